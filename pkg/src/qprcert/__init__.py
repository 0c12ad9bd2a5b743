from .certifier import CertificateKind, NoGoCertificate, certify, certify_batch, nonnegative_battery, recheck
from .config import DEFAULT_TOL, RunConfig
from .ontic import AffineEffectRep, AffineStateRep, OnticSpace, TabulatedEffectRep, TabulatedStateRep
from .pauli import DensityOp, HermitianOp, Povm, PovmElement
from .report import CheckReport

__all__: tuple[str, ...] = (
    "DEFAULT_TOL",
    "AffineEffectRep",
    "AffineStateRep",
    "CertificateKind",
    "CheckReport",
    "DensityOp",
    "HermitianOp",
    "NoGoCertificate",
    "OnticSpace",
    "Povm",
    "PovmElement",
    "RunConfig",
    "TabulatedEffectRep",
    "TabulatedStateRep",
    "certify",
    "certify_batch",
    "nonnegative_battery",
    "recheck",
)
