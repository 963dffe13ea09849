"""Multiwavelet packets and frame packets for integer dilation matrices."""

from ._core import (
    FilterBank,
    PacketTree,
    PacketlabError,
    best_basis,
    check_partition,
    decompose,
    digit_sets,
    level_basis,
    random_unitary,
    reconstruct,
    wavelet_basis,
)

__all__ = [
    "FilterBank",
    "PacketTree",
    "PacketlabError",
    "best_basis",
    "check_partition",
    "decompose",
    "digit_sets",
    "level_basis",
    "random_unitary",
    "reconstruct",
    "wavelet_basis",
]
