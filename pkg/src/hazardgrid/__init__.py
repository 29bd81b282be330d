"""Weather-driven line-outage scenarios and minimum-load-shed DC-OPF studies."""

__version__ = "0.1.0"
