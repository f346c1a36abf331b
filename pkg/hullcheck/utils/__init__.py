"""Configuration helpers shared by the core and CLI layers."""
