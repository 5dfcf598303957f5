"""Pydantic data models: configuration, games, converter specs and file formats."""
