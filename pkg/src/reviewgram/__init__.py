"""Opinion mining over star-rated reviews with bigram/trigram language models."""

__version__ = "0.1.0"
