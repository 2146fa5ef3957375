"""Experiment configuration: TOML in, validated model objects out.

Complex numbers are written as two-element arrays [re, im] (plain
numbers are accepted where the imaginary part is zero).  Every
validation failure raises ConfigError carrying the dotted path of the
offending field.
"""

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import ConfigError
from .funcs import (
    FunctionModel,
    entire_exp,
    log_branch,
    rational,
    sqrt_branch,
)
from .geometry import GeometrySpec, NodeTable

_CHECK_NAMES = ("rate", "rho0", "approx", "derivative", "incomplete", "independence")
_PROBE_KINDS = ("grid_in_e", "level_curve", "disk_grid")


class ExperimentConfig:
    __slots__ = (
        "name",
        "description",
        "geometry",
        "table",
        "functions",
        "multi_index",
        "n_range",
        "probes",
        "checks",
        "incomplete",
        "output_dir",
    )

    def __init__(self, **kw):
        for key in self.__slots__:
            setattr(self, key, kw[key])


def load_config(path, n_max=None, output_dir=None):
    """Parse and validate a config file, applying CLI overrides."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(str(exc), location=str(path))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("not valid TOML: %s" % exc, location=str(path))
    return config_from_dict(data, n_max=n_max, output_dir=output_dir)


def config_from_dict(data, n_max=None, output_dir=None):
    name = _get_str(data, "name", default="experiment")
    description = _get_str(data, "description", default="")

    geometry = _geometry_from(_require(data, "geometry", dict))
    table = _table_from(_require(data, "table", dict), geometry)
    functions = _functions_from(_require(data, "functions", list))

    multi_index = _require(data, "multi_index", list)
    if len(multi_index) != len(functions):
        raise ConfigError(
            "needs one entry per function (%d functions, %d entries)"
            % (len(functions), len(multi_index)),
            location="multi_index",
        )
    for i, m in enumerate(multi_index):
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise ConfigError(
                "entries must be integers >= 1, got %r" % (m,),
                location="multi_index[%d]" % i,
            )

    n_range = _require(data, "n_range", list)
    if (
        len(n_range) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in n_range)
    ):
        raise ConfigError("must be [lo, hi] with integers", location="n_range")
    lo, hi = n_range
    if n_max is not None:
        hi = int(n_max)
    if lo < sum(multi_index):
        raise ConfigError(
            "lo must be at least the multi-index total %d" % sum(multi_index),
            location="n_range",
        )
    if hi < lo:
        raise ConfigError("hi must be >= lo", location="n_range")

    checks = data.get("checks", ["rate"])
    if not isinstance(checks, list) or not checks:
        raise ConfigError("must be a nonempty list", location="checks")
    for i, c in enumerate(checks):
        if c not in _CHECK_NAMES:
            raise ConfigError(
                "unknown check %r (allowed: %s)" % (c, ", ".join(_CHECK_NAMES)),
                location="checks[%d]" % i,
            )

    probes = [
        _probe_from(p, "probes[%d]" % i)
        for i, p in enumerate(data.get("probes", []))
    ]
    if "approx" in checks and not probes:
        raise ConfigError("the approx check needs at least one probe", location="probes")

    incomplete = None
    if "incomplete" in checks:
        inc = _require(data, "incomplete", dict)
        m = inc.get("m")
        m_star = inc.get("m_star")
        if not isinstance(m, int) or m < 1:
            raise ConfigError("m must be an integer >= 1", location="incomplete.m")
        if not isinstance(m_star, int) or not 1 <= m_star <= m:
            raise ConfigError(
                "m_star must be an integer in [1, m]", location="incomplete.m_star"
            )
        incomplete = {"m": m, "m_star": m_star}

    out_dir = output_dir or data.get("output_dir") or ("out/%s" % name)
    if not isinstance(out_dir, str):
        raise ConfigError("must be a string path", location="output_dir")

    return ExperimentConfig(
        name=name,
        description=description,
        geometry=geometry,
        table=table,
        functions=functions,
        multi_index=[int(m) for m in multi_index],
        n_range=(int(lo), int(hi)),
        probes=probes,
        checks=list(checks),
        incomplete=incomplete,
        output_dir=out_dir,
    )


def _require(data, key, typ):
    if key not in data:
        raise ConfigError("missing required field", location=key)
    value = data[key]
    if not isinstance(value, typ):
        raise ConfigError(
            "expected %s, got %s" % (typ.__name__, type(value).__name__),
            location=key,
        )
    return value


def _get_str(data, key, default):
    value = data.get(key, default)
    if not isinstance(value, str):
        raise ConfigError("expected string", location=key)
    return value


def _complex_value(value, location):
    if isinstance(value, bool):
        raise ConfigError("expected a number or [re, im]", location=location)
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError("expected a number or [re, im]", location=location)


def _real_value(value, location):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a real number", location=location)
    return float(value)


def _coefficients(value, location):
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a nonempty coefficient list", location=location)
    return [_complex_value(v, "%s[%d]" % (location, i)) for i, v in enumerate(value)]


def _geometry_from(data):
    kind = data.get("kind")
    try:
        if kind == "disk":
            return GeometrySpec.disk(
                _complex_value(data.get("center", 0.0), "geometry.center"),
                _real_value(data.get("radius"), "geometry.radius"),
            )
        if kind == "segment":
            return GeometrySpec.segment(
                _complex_value(data.get("a"), "geometry.a"),
                _complex_value(data.get("b"), "geometry.b"),
            )
        if kind == "ellipse":
            return GeometrySpec.ellipse(
                _complex_value(data.get("center", 0.0), "geometry.center"),
                _real_value(data.get("semi_major"), "geometry.semi_major"),
                _real_value(data.get("semi_minor"), "geometry.semi_minor"),
                _real_value(data.get("rotation", 0.0), "geometry.rotation"),
            )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), location="geometry")
    raise ConfigError(
        "kind must be disk, segment or ellipse, got %r" % (kind,),
        location="geometry.kind",
    )


def _table_from(data, geometry):
    scheme = data.get("scheme")
    if not isinstance(scheme, str):
        raise ConfigError("missing node scheme", location="table.scheme")
    point = None
    if "point" in data:
        point = _complex_value(data["point"], "table.point")
    try:
        return NodeTable(geometry, scheme, point=point)
    except ValueError as exc:
        raise ConfigError(str(exc), location="table")


def _functions_from(items):
    if not items:
        raise ConfigError("need at least one function", location="functions")
    out = []
    for i, entry in enumerate(items):
        loc = "functions[%d]" % i
        if not isinstance(entry, dict):
            raise ConfigError("expected a table", location=loc)
        terms_data = entry.get("terms")
        if not isinstance(terms_data, list) or not terms_data:
            raise ConfigError("needs a nonempty terms list", location=loc + ".terms")
        terms = [
            _term_from(t, "%s.terms[%d]" % (loc, j))
            for j, t in enumerate(terms_data)
        ]
        try:
            out.append(FunctionModel(terms))
        except Exception as exc:
            raise ConfigError(str(exc), location=loc)
    return out


def _term_from(data, location):
    if not isinstance(data, dict):
        raise ConfigError("expected a table", location=location)
    kind = data.get("kind")
    try:
        if kind == "rational":
            return rational(
                _coefficients(data.get("numerator"), location + ".numerator"),
                _coefficients(data.get("denominator"), location + ".denominator"),
            )
        if kind in ("sqrt_branch", "log_branch"):
            maker = sqrt_branch if kind == "sqrt_branch" else log_branch
            cut = data.get("cut_direction")
            return maker(
                _complex_value(data.get("branch_at"), location + ".branch_at"),
                _complex_value(data.get("scale", 1.0), location + ".scale"),
                None if cut is None else _complex_value(cut, location + ".cut_direction"),
            )
        if kind == "entire_exp":
            return entire_exp(
                _complex_value(data.get("scale", 1.0), location + ".scale")
            )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), location=location)
    raise ConfigError(
        "kind must be rational, sqrt_branch, log_branch or entire_exp, got %r"
        % (kind,),
        location=location + ".kind",
    )


def _probe_from(data, location):
    if not isinstance(data, dict):
        raise ConfigError("expected a table", location=location)
    kind = data.get("kind")
    if kind not in _PROBE_KINDS:
        raise ConfigError(
            "kind must be one of %s" % (", ".join(_PROBE_KINDS),),
            location=location + ".kind",
        )
    probe = {"kind": kind}
    if kind == "grid_in_e":
        probe["count"] = int(
            _real_value(data.get("count", 100), location + ".count")
        )
    elif kind == "level_curve":
        probe["rho"] = _real_value(data.get("rho"), location + ".rho")
        if probe["rho"] <= 1.0:
            raise ConfigError("rho must exceed 1", location=location + ".rho")
        probe["count"] = int(_real_value(data.get("count", 64), location + ".count"))
    else:
        probe["center"] = _complex_value(data.get("center"), location + ".center")
        probe["radius"] = _real_value(data.get("radius"), location + ".radius")
        probe["step"] = _real_value(data.get("step"), location + ".step")
        if probe["radius"] <= 0 or probe["step"] <= 0:
            raise ConfigError(
                "radius and step must be positive", location=location
            )
    return probe
