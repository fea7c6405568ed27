"""Zero-knowledge proof of location: pairing-based SNARK, certificate ledger and protocol harness."""
from .curve import ORACLE, REALISTIC, GroupElement, GTElement, PairingEngine, get_engine, group_exp, pairing
from .field import FieldElement, PrimeField, field_add, field_inv, field_mul
from .hashing import AlgebraicHashParams, hash_bytes, hash_field
from .circuit import Circuit, CircuitBuilder, Witness, compute_witness
from .qap import QapInstance, assemble, circuit_to_qap
from .snark import Proof, ProvingKey, VerificationKey, Verdict, prove, setup, verify
from .identity import KeyPair, keygen, open_envelope, seal, sign, verify_sig
from .ledger import Block, CertificateDigest, Ledger, ServiceRecord
from .zkcircuit import PrivacyLevel, build_zkpol_circuit
from .protocol import (CrsBundle, GeoCoordinate, LocationCertificate, ServiceRequest, ap_issue,
                       server_handle, user_assemble_certificate, user_request_certificate,
                       user_request_service)

__version__ = "0.1.0"

__all__ = [
    "ORACLE", "REALISTIC", "GroupElement", "GTElement", "PairingEngine", "get_engine", "group_exp", "pairing",
    "FieldElement", "PrimeField", "field_add", "field_inv", "field_mul",
    "AlgebraicHashParams", "hash_bytes", "hash_field",
    "Circuit", "CircuitBuilder", "Witness", "compute_witness",
    "QapInstance", "assemble", "circuit_to_qap",
    "Proof", "ProvingKey", "VerificationKey", "Verdict", "prove", "setup", "verify",
    "KeyPair", "keygen", "open_envelope", "seal", "sign", "verify_sig",
    "Block", "CertificateDigest", "Ledger", "ServiceRecord",
    "PrivacyLevel", "build_zkpol_circuit",
    "CrsBundle", "GeoCoordinate", "LocationCertificate", "ServiceRequest", "ap_issue", "server_handle",
    "user_assemble_certificate", "user_request_certificate", "user_request_service",
]
