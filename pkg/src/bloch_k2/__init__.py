"""Bloch groups, Bloch-Wigner regulators and K2 order predictions for number fields."""

__version__ = "0.1.0"

from .apnum import (DirichletCharacter, PrecisionContext, bloch_wigner, characters_mod,
                    dirichlet_L2, hurwitz_zeta2, li2)
from .bloch import (BlochCertificate, CertificateStatus, FormalSum, parse_formal_sum,
                    verify_bloch_element, dilog_value)
from .lichtenbaum import (K2Report, RegulatorMatrix, cyclotomic_regulator_closed,
                          cyclotomic_regulator_det, k2_predict, regulator, theorem33_chain, w2)
from .nfield import FieldElement, NumberField, create_field, cyclotomic_field, parse_element
from .zeta import (TransportFactor, ZetaResult, cyclotomic_zeta2, dedekind_zeta2,
                   euler_factor_degrees, transport_to_minus1)

__all__ = [
    "BlochCertificate", "CertificateStatus", "DirichletCharacter", "FieldElement", "FormalSum",
    "K2Report", "NumberField", "PrecisionContext", "RegulatorMatrix", "TransportFactor",
    "ZetaResult", "bloch_wigner", "characters_mod", "create_field", "cyclotomic_field",
    "cyclotomic_regulator_closed", "cyclotomic_regulator_det", "cyclotomic_zeta2",
    "dedekind_zeta2", "dilog_value", "dirichlet_L2", "euler_factor_degrees", "hurwitz_zeta2",
    "k2_predict", "li2", "parse_element", "parse_formal_sum", "regulator", "theorem33_chain",
    "transport_to_minus1", "verify_bloch_element", "w2",
]
