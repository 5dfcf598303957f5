"""Game operations, best response polytopes, converters and generators."""
