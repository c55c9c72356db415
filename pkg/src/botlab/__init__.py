"""botlab: backend analytics engine and session server for interactive
spambot labeling.

The pipeline: ingest an account/tweet corpus, extract the fifty-feature
representation (time-independent and binned by year/month/day), score
lexicon sentiment, reduce to 2-D with K-PCA / supervised LDA / LLE / t-SNE,
infer topics with collapsed Gibbs LDA, and serve everything to linked-view
clients over a JSON envelope protocol with durable label storage.
"""

__version__ = "0.1.0"
