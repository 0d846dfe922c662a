"""Joint BS/IRS beamforming for ISAC sensing mutual information maximization."""

__version__ = "0.1.0"
