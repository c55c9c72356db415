"""Exception hierarchy shared by all botlab modules.

Errors carry enough location detail (line numbers, ids, field names) to be
surfaced verbatim by the CLI and the wire protocol.
"""


class BotlabError(Exception):
    """Base class for every error raised by this package."""

    code = "error"

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


# --- ingest -----------------------------------------------------------------

class FileMissing(BotlabError):
    code = "file_missing"


class MalformedRow(BotlabError):
    code = "malformed_row"

    def __init__(self, line: int, message: str = ""):
        self.line = line
        super().__init__(f"line {line}: {message}" if message else f"line {line}")


class UnparseableTimestamp(MalformedRow):
    code = "unparseable_timestamp"


class OrphanTweet(BotlabError):
    code = "orphan_tweet"

    def __init__(self, tweet_id: str):
        self.tweet_id = tweet_id
        super().__init__(f"tweet {tweet_id} references an unknown account")


class DuplicateId(BotlabError):
    code = "duplicate_id"

    def __init__(self, dup_id: str):
        self.dup_id = dup_id
        super().__init__(f"duplicate id {dup_id}")


# --- lexicon / sentiment ----------------------------------------------------

class OutOfRangeValue(MalformedRow):
    code = "out_of_range_value"


# --- numeric inputs ---------------------------------------------------------

class EmptyCorpus(BotlabError):
    code = "empty_corpus"


class EmptyInput(BotlabError):
    code = "empty_input"


class NonFiniteInput(BotlabError):
    code = "non_finite_input"


class NonFiniteBandwidth(BotlabError):
    code = "non_finite_bandwidth"


class LengthMismatch(BotlabError):
    code = "length_mismatch"


# --- dimensionality reduction -----------------------------------------------

class TooFewPoints(BotlabError):
    code = "too_few_points"


class InsufficientClasses(BotlabError):
    code = "insufficient_classes"


class InvalidHyperparameter(BotlabError):
    code = "invalid_hyperparameter"

    def __init__(self, name: str, message: str = ""):
        self.name = name
        super().__init__(f"{name}: {message}" if message else name)


class DidNotConverge(BotlabError):
    code = "did_not_converge"


class Cancelled(BotlabError):
    code = "cancelled"


# --- topics -----------------------------------------------------------------

class EmptyWindow(BotlabError):
    code = "empty_window"


class EmptyDocuments(BotlabError):
    code = "empty_documents"


class UnknownTopicId(BotlabError):
    code = "unknown_topic_id"

    def __init__(self, topic_id):
        self.topic_id = topic_id
        super().__init__(f"unknown topic id {topic_id}")


class EmptySelection(BotlabError):
    code = "empty_selection"


# --- session ----------------------------------------------------------------

class UnknownAccountId(BotlabError):
    code = "unknown_account_id"

    def __init__(self, account_id: str):
        self.account_id = account_id
        super().__init__(f"unknown account id {account_id}")


class PersistenceFailure(BotlabError):
    code = "persistence_failure"


class IoFailure(BotlabError):
    code = "io_failure"


# --- server -----------------------------------------------------------------

class InvalidQuery(BotlabError):
    code = "invalid_query"

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "field": self.field}


class UnknownFeature(BotlabError):
    code = "unknown_feature"


class JobPending(BotlabError):
    code = "job_pending"


class UnknownJob(BotlabError):
    code = "unknown_job"


class PortInUse(BotlabError):
    code = "port_in_use"


class CorruptArtifact(BotlabError):
    code = "corrupt_artifact"


# --- evaluator --------------------------------------------------------------

class IdMismatch(BotlabError):
    code = "id_mismatch"


class MalformedCsv(BotlabError):
    code = "malformed_csv"
