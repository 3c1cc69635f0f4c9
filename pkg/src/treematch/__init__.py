"""Maximum agreement subtrees of labeled trees via bipartite matching."""

__version__ = "0.1.0"
