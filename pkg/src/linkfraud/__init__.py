"""Link-fraud characterization: local network extraction, network and entropy
features, synthetic fraud regimes, an SVM classifier and a polling simulator."""

__version__ = "0.1.0"
