"""oniq: hybrid quantum-classical graph model for ocean Nino index forecasting.

Subpackages follow the processing chain: ``qsim`` (statevector circuit
simulation), ``graph`` (GCN with learnable adjacency), ``hybrid`` (the
composed model), ``train`` (optimizer and loop), ``data`` (native dataset
format and synthetic generator), ``metrics`` (all-season correlation skill),
``cli`` (command-line entry point).
"""

__version__ = "0.1.0"
