"""Preprocessing, corpus construction and n-best reranking for neural MT."""

__version__ = "0.1.0"

FORMAT_VERSIONS = {
    "bpe-merges": "v1",
    "maskplan": "v1",
    "recipe": "v1",
    "rng": "mt19937-random-v1",
}
