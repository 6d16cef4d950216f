"""IRS-assisted FSO channel modeling.

Closed-form reflected field and gain of a Gaussian beam reflected by a
phase-gradient intelligent reflecting surface, a Huygens-Fresnel
quadrature to check them against, and Gamma-Gamma BER evaluation.
"""

__version__ = "1.0.0"

from ._backend import BACKEND
from .analytic import (AnalyticCoefficients, ValidityReport, analytic_coeffs,
                       anomalous_mirror_field_far, default_phase_gradients, mirror_field_far,
                       reflected_field_analytic, validity_distances)
from .beam import BeamParams, IncidentGeometry, incident_field_on_irs, incident_geometry
from .errors import (ArgumentOverflowError, ConfigurationError, ConvergenceError, IrsFsoError,
                     PoleError, RegimeError, ResolutionError, SchemaError)
from .fading_ber import (GammaGammaParams, OokLink, ber_monte_carlo, ber_series, gg_sample,
                         xi_coeff)
from .gain import (GainCoefficients, LinkBudget, atmospheric_loss, channel_gain,
                   channel_gain_far_field, channel_gain_in_plane, channel_gain_out_of_plane,
                   end_to_end_gain, gain_coeffs, link_budget)
from .geometry import FootprintCenter, SphericalPose
from .oracle import (FieldProfile, QuadratureSpec, channel_gain_oracle, power_density,
                     reflected_field_hf, reflected_field_hf_lens, transmit_power)
from .scenario import IrsConfig, Medium, Scenario, default_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
