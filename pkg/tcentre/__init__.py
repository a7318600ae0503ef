"""
T Centre Spin Toolkit
=====================
Simulation and analysis of the silicon T centre electron-hydrogen spin system.

Subpackages:
- spin_core: Ground/excited spin Hamiltonians and the dense linear algebra behind them
- orientations: The 12 defect orientations and field-direction partitions
- spectra: Transition frequencies, effective hyperfine quantities, synthetic ODMR spectra
- tensor_fit: Simultaneous least-squares fit of the hyperfine tensor to resonance data
- decoherence: Optical-cycle nuclear memory decoherence, DPM and correction unitaries
- cli: Command-line front end with reproducible file output
"""

__version__ = '1.0.0'

__all__ = ['__version__']
