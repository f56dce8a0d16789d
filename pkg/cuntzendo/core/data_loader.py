import json
import os
import logging

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from cuntzendo.core.algebra import AlgebraElement
from cuntzendo.core.endomorphism import PermutationMap
from cuntzendo.core.errors import CuntzError, ParseError
from cuntzendo.core.settings import Settings

REFERENCE_SETTINGS = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))),
                                  'reference', 'settings.toml')
ENV_EPS = "CUNTZ_ENDO_EPS"

_SETTING_TYPES = {
    'eps': float,
    'max_level': int,
    'max_terms': int,
    'seed': int,
    'weyl_samples': int,
    'max_group_order': int,
    'induced_guard': int,
}


class Data:
    """Layered settings: defaults, reference/settings.toml, a user config, then the environment."""

    def __init__(self):
        self.settings = Settings()
        self.sources = ['defaults']

    def load_reference(self, path=REFERENCE_SETTINGS):
        try:
            with open(path, 'rb') as f:
                d = tomllib.load(f)
        except FileNotFoundError:
            logging.warning(f"Reference settings not found at {path}, using built-in defaults")
            return self
        except tomllib.TOMLDecodeError as e:
            raise ParseError(f"{path}: {e}")
        logging.debug(f"Loaded reference settings from {path}")
        self._apply(d.get('settings', d), path)
        return self

    def load_config(self, config_source):
        """
        Layers settings from a TOML file path or an already-parsed dict.

        Keys are read from the [settings] table, or from the top level when
        there is no such table. Unknown keys are logged and ignored; bad types,
        unreadable files and TOML syntax errors raise ParseError.
        """
        if config_source is None:
            return self
        if isinstance(config_source, str):
            logging.info(f"Loading configuration from file: {config_source}")
            try:
                with open(config_source, 'rb') as conffile:
                    d = tomllib.load(conffile)
            except OSError as e:
                raise ParseError(f"{config_source}: {e.strerror}")
            except tomllib.TOMLDecodeError as e:
                raise ParseError(f"{config_source}: {e}")
        elif isinstance(config_source, dict):
            logging.info("Loading configuration from dictionary.")
            d = config_source
        else:
            raise ParseError("config_source must be a file path (str) or a dictionary (dict)")
        self._apply(d.get('settings', d), config_source if isinstance(config_source, str) else 'dict')
        return self

    def load_environment(self, environ=None):
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_EPS)
        if raw:
            try:
                self.settings = self.settings.replace(eps=float(raw))
            except ValueError:
                raise ParseError(f"{ENV_EPS}={raw!r} is not a number")
            self.sources.append(ENV_EPS)
        return self

    def override(self, **flags):
        self.settings = self.settings.replace(**flags)
        if any(v is not None for v in flags.values()):
            self.sources.append('flags')
        return self

    def _apply(self, d, origin):
        if not isinstance(d, dict):
            raise ParseError(f"{origin}: [settings] must be a table")
        changes = {}
        for key, value in d.items():
            if key not in _SETTING_TYPES:
                logging.warning(f"{origin}: ignoring unknown setting '{key}'")
                continue
            kind = _SETTING_TYPES[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)) or (kind is int and not isinstance(value, int)):
                raise ParseError(f"{origin}: settings.{key} must be {kind.__name__}, got {value!r}")
            changes[key] = kind(value)
        self.settings = self.settings.replace(**changes)
        self.sources.append(origin)


def load_settings(config_source=None, environ=None, **flags):
    """Resolve the full settings stack in precedence order."""
    return (Data().load_reference().load_config(config_source)
            .load_environment(environ).override(**flags).settings)


# --- element and permutation JSON ---

def _parse_json(text, origin):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{origin}: line {e.lineno} col {e.colno}: {e.msg}")


def _read(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}")


def _word_field(value, n, where):
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array of letters, got {type(value).__name__}")
    for pos, letter in enumerate(value):
        if isinstance(letter, bool) or not isinstance(letter, int) or not 1 <= letter <= n:
            raise ParseError(f"{where}[{pos}]: letter {letter!r} outside 1..{n}")
    return tuple(value)


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def element_from_dict(d, origin='element'):
    if not isinstance(d, dict):
        raise ParseError(f"{origin}: expected an object with 'n' and 'terms'")
    n = d.get('n')
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ParseError(f"{origin}: n must be an integer >= 2, got {n!r}")
    terms = d.get('terms')
    if not isinstance(terms, list):
        raise ParseError(f"{origin}: terms must be an array")
    coeffs = {}
    for idx, term in enumerate(terms):
        where = f"{origin}: terms[{idx}]"
        if not isinstance(term, dict):
            raise ParseError(f"{where}: expected an object")
        alpha = _word_field(term.get('alpha'), n, f"{where}.alpha")
        beta = _word_field(term.get('beta'), n, f"{where}.beta")
        coeff = complex(_number(term.get('re', 0.0), f"{where}.re"), _number(term.get('im', 0.0), f"{where}.im"))
        coeffs[(alpha, beta)] = coeffs.get((alpha, beta), 0) + coeff
    try:
        return AlgebraElement(n, coeffs)
    except CuntzError as e:
        raise ParseError(f"{origin}: {e}")


def element_to_dict(x):
    return {
        'n': x.n,
        'terms': [{'re': float(t.coeff.real), 'im': float(t.coeff.imag),
                   'alpha': list(t.alpha), 'beta': list(t.beta)} for t in x.terms],
    }


def parse_element(text, origin='element'):
    return element_from_dict(_parse_json(text, origin), origin)


def load_element(path):
    logging.info(f"Loading element from file: {path}")
    return parse_element(_read(path), path)


def dump_element(x):
    return json.dumps(element_to_dict(x), indent=2)


def save_element(x, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dump_element(x) + "\n")


def permutation_from_dict(d, origin='permutation'):
    if not isinstance(d, dict):
        raise ParseError(f"{origin}: expected an object with 'n', 'k' and 'pairs'")
    n, k = d.get('n'), d.get('k')
    for name, value in (('n', n), ('k', k)):
        if isinstance(value, bool) or not isinstance(value, int) or value < (2 if name == 'n' else 1):
            raise ParseError(f"{origin}: {name} has invalid value {value!r}")
    pairs = d.get('pairs')
    if not isinstance(pairs, list):
        raise ParseError(f"{origin}: pairs must be an array")
    parsed = []
    for idx, pair in enumerate(pairs):
        where = f"{origin}: pairs[{idx}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{where}: expected [source, target]")
        source = _word_field(pair[0], n, f"{where}[0]")
        target = _word_field(pair[1], n, f"{where}[1]")
        if len(source) != k or len(target) != k:
            raise ParseError(f"{where}: words must have length {k}")
        parsed.append((source, target))
    try:
        return PermutationMap(n, k, tuple(parsed))
    except CuntzError as e:
        raise ParseError(f"{origin}: {e}")


def permutation_to_dict(p):
    return {'n': p.n, 'k': p.k, 'pairs': [[list(s), list(t)] for s, t in p.pairs]}


def parse_permutation(text, origin='permutation'):
    return permutation_from_dict(_parse_json(text, origin), origin)


def load_permutation(path):
    return parse_permutation(_read(path), path)
