"""The ``efrl`` command line."""
