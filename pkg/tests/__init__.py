# Tests for code-ingest
