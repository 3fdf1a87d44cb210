"""
Overlap-free binary words: Thue-Morse generation, similarity densities,
the Fife automaton and finite-scale verification of density bounds
"""
from .config import Config, get_config, set_config
from .errors import OvlfError
from .fife import FifePath, classify_path, default_automaton, fbe_decode, validate_path
from .mahler import shift_density, sigma
from .powerfree import find_overlap, is_overlap_free, is_pq_power_free
from .similarity import estimate_lsd_usd, sd, sd_curve
from .words import FiniteWord, h_prefix, parse_spec, t_n, thue_morse_prefix

__version__ = "1.0.0"

__all__ = [
    'Config', 'get_config', 'set_config', 'OvlfError', 'FifePath', 'classify_path',
    'default_automaton', 'fbe_decode', 'validate_path', 'shift_density', 'sigma',
    'find_overlap', 'is_overlap_free', 'is_pq_power_free', 'estimate_lsd_usd', 'sd',
    'sd_curve', 'FiniteWord', 'h_prefix', 'parse_spec', 't_n', 'thue_morse_prefix',
]
