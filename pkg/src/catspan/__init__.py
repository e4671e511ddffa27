"""Light spanners for graphs of bounded pathwidth and catwidth."""
