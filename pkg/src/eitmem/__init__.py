"""eitmem: four-channel EIT quantum memory for a polarization-encoded cluster state.

Subpackages/modules:
    states     - pure states, density matrices, channels, fidelity
    channels   - dark-state-polariton storage/retrieval of the four photons
    witness    - projector entanglement witness and fidelity thresholds
    dynamics   - light-storage integrator and optimal-control efficiency
    dephasing  - motional dephasing lifetimes and the Monte Carlo oracle
    cli        - configuration-driven experiment runner
"""

__version__ = "0.1.0"
