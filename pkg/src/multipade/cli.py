"""Experiment runner: `multipade run <config>` and `multipade list-examples`.

Exit codes: 0 all checks passed, 1 at least one check failed its
tolerance, 2 configuration problem, 3 numerical failure while running.
"""

import argparse
import json
import math
import os
import sys
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .analysis import (
    approximant_error_scan,
    derivative_rate_check,
    estimate_rho0,
    geometric_decay_test,
    run_incomplete_sequence,
    run_row_sequence,
    track_convergence,
)
from .config import load_config
from .errors import ConfigError, MultipadeError
from .funcs import SystemModel, rho_meromorphy, rho_zero
from .geometry import phi
from .oracle import polynomial_independence, predicted_theta, r_values, system_poles
from .plots import render_decay_plot

_LOG_TOL = math.log(1.15)
_RHO0_N_HI = 40
_RHO0_REL_TOL = 0.10
_CONVERGED_DEV = 1e-2
_DISPERSION_FLOOR = 0.05


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="multipade",
        description="Row sequences of shared-denominator rational "
        "interpolants, with rate checks against declared singularities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a TOML experiment config")
    p_run.add_argument("--output-dir", default=None, help="override output_dir")
    p_run.add_argument(
        "--n-max", type=int, default=None, help="override the upper end of n_range"
    )
    p_run.add_argument(
        "--json-only",
        action="store_true",
        help="skip SVG plots (JSON and CSV are still written)",
    )
    sub.add_parser("list-examples", help="list bundled example configs")
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_list()


def _cmd_run(args):
    try:
        config = load_config(
            args.config, n_max=args.n_max, output_dir=args.output_dir
        )
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    try:
        system = SystemModel(
            config.functions, config.multi_index, config.geometry, config.table
        )
    except (ValueError, MultipadeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    try:
        checks, artifacts = _run_experiment(config, system, args.json_only)
    except MultipadeError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3

    os.makedirs(config.output_dir, exist_ok=True)
    for name, text in artifacts:
        with open(os.path.join(config.output_dir, name), "w") as fh:
            fh.write(text)

    failed = [name for name, entry in checks.items() if not entry["passed"]]
    for name in config.checks:
        entry = checks[name]
        print("check %-12s %s  %s" % (name, "PASS" if entry["passed"] else "FAIL",
                                      entry.get("summary", "")))
    print("wrote %s" % os.path.join(config.output_dir, "report.json"))
    return 1 if failed else 0


def _run_experiment(config, system, json_only):
    geometry = config.geometry
    n_lo, n_hi = config.n_range

    pole_set = r_values(system_poles(system), system)
    complete = pole_set.total_order == system.total_order
    theta = predicted_theta(pole_set, geometry) if complete else None

    report = None
    if any(c in config.checks for c in ("rate", "approx", "derivative")):
        q_ref = pole_set.Q_mf if complete else None
        report = run_row_sequence(system, n_lo, n_hi, q_ref=q_ref)
        report.predicted_theta = theta

    checks = {}
    artifacts = []
    for name in config.checks:
        if name == "rate":
            entry, plots = _check_rate(report, theta, complete)
        elif name == "rho0":
            entry, plots = _check_rho0(config, system)
        elif name == "approx":
            entry, plots = _check_approx(config, system, report, pole_set, complete)
        elif name == "derivative":
            entry, plots = _check_derivative(system, report, pole_set, complete)
        elif name == "incomplete":
            entry, plots = _check_incomplete(config, system)
        else:
            entry, plots = _check_independence(system), []
        checks[name] = entry
        for fname, text in plots:
            if json_only and fname.endswith(".svg"):
                continue
            artifacts.append((fname, text))

    doc = {
        "name": config.name,
        "description": config.description,
        "predicted_theta": theta,
        "oracle": _pole_set_dict(pole_set),
        "report": report.to_dict() if report is not None else None,
        "checks": checks,
        "passed": all(entry["passed"] for entry in checks.values()),
    }
    artifacts.append(
        ("report.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    )
    return checks, artifacts


def _check_rate(report, theta, complete):
    if complete:
        if theta == 0.0:
            passed = report.exact
            summary = "exact recovery" if passed else "expected exact recovery"
        else:
            passed = (
                report.fitted_theta is not None
                and report.fitted_theta > 0.0
                and abs(math.log(report.fitted_theta / theta)) <= _LOG_TOL
            )
            summary = "fitted %.4g vs predicted %.4g" % (report.fitted_theta, theta)
    else:
        # Fewer forced poles than the multi-index assumes: the converse
        # statement says denominators must NOT settle geometrically.
        passed = not geometric_decay_test(report)
        summary = "non-stabilization %s (fitted %.3g, residual %.3g)" % (
            "confirmed" if passed else "not confirmed",
            report.fitted_theta if report.fitted_theta is not None else float("nan"),
            report.fit_residual if report.fit_residual is not None else float("nan"),
        )
    entry = {
        "passed": bool(passed),
        "summary": summary,
        "fitted_theta": report.fitted_theta,
        "predicted_theta": theta,
        "exact": report.exact,
        "window": list(report.fit_window) if report.fit_window else None,
        "residual": report.fit_residual,
        "mode": "oracle" if complete else "converse",
    }
    rows = [
        (n, err, (theta ** n if theta else 0.0))
        for n, err in zip(report.n_values, report.q_errors)
    ]
    plots = [
        ("rate.csv", _csv(rows)),
        (
            "rate.svg",
            render_decay_plot(
                "denominator error vs n",
                report.n_values,
                report.q_errors,
                guide_rate=theta,
                guide_label=("predicted rate %.4g" % theta) if theta else None,
            ),
        ),
    ]
    return entry, plots


def _check_rho0(config, system):
    results = []
    passed = True
    for k, f in enumerate(system.functions):
        reference = rho_zero(f, config.geometry)
        estimate = estimate_rho0(f, config.geometry, config.table, _RHO0_N_HI)
        if math.isinf(reference) and math.isinf(estimate):
            ok = True
        elif math.isfinite(reference) and math.isfinite(estimate):
            ok = abs(estimate - reference) <= _RHO0_REL_TOL * reference
        else:
            ok = False
        passed = passed and ok
        results.append({"function": k, "estimate": estimate, "reference": reference,
                        "passed": ok})
    entry = {
        "passed": passed,
        "summary": "; ".join(
            "f%d: %.4g vs %.4g" % (r["function"], r["estimate"], r["reference"])
            for r in results
        ),
        "per_function": results,
    }
    rows = [(r["function"], r["estimate"], r["reference"]) for r in results]
    plots = [
        ("rho0.csv", _csv(rows)),
        (
            "rho0.svg",
            render_decay_plot(
                "first singularity level: estimate per function",
                [r["function"] for r in results],
                [r["estimate"] for r in results],
            ),
        ),
    ]
    return entry, plots


def _check_approx(config, system, report, pole_set, complete):
    entries = []
    passed = complete
    for probe in config.probes:
        for k in range(len(system.functions)):
            scan = approximant_error_scan(system, report, k, probe)
            r_star = pole_set.per_function[k]["R_k_star"]
            bound = 0.0 if math.isinf(r_star) else scan["phi_sup"] / r_star
            ok = complete and scan["fitted_rate"] <= bound * 1.15 + 1e-12
            scan["bound_rate"] = bound
            scan["passed"] = ok
            passed = passed and ok
            entries.append(scan)
    entry = {
        "passed": passed,
        "summary": "; ".join(
            "%s f%d: %.3g vs bound %.3g"
            % (e["probe"], e["function"], e["fitted_rate"], e["bound_rate"])
            for e in entries
        )
        + ("" if complete else " (pole set incomplete)"),
        "scans": entries,
    }
    first = entries[0]
    rows = [
        (n, err, first["bound_rate"] ** n)
        for n, err in zip(report.n_values, first["errors"])
    ]
    plots = [
        ("approx.csv", _csv(rows)),
        (
            "approx.svg",
            render_decay_plot(
                "approximant sup error on %s" % first["probe"],
                report.n_values,
                first["errors"],
                guide_rate=first["bound_rate"] or None,
                guide_label="bound rate %.4g" % first["bound_rate"],
            ),
        ),
    ]
    return entry, plots


def _check_derivative(system, report, pole_set, complete):
    entries = []
    passed = complete
    for loc, tau in pole_set.poles:
        data = derivative_rate_check(system, report, loc, tau - 1)
        level = abs(phi(system.geometry, loc))
        radii = pole_set.per_pole[_match_key(pole_set.per_pole, loc)]["R_xi_s"]
        oks = []
        preds = []
        for l in range(tau):
            pred = 0.0 if math.isinf(radii[l]) else level / radii[l]
            run = data["running_max"][l]
            if pred == 0.0:
                ok = data["peaks"][l] <= 1e-6
            else:
                ok = run > 0.0 and abs(math.log(run / pred)) <= _LOG_TOL
            preds.append(pred)
            oks.append(ok)
        data["predicted"] = preds
        data["passed"] = all(oks) and complete
        passed = passed and data["passed"]
        entries.append(data)
    entry = {
        "passed": passed,
        "summary": "; ".join(
            "xi=%s: %s vs %s"
            % (
                _fmt_complex(d["xi"]),
                ["%.3g" % r for r in d["running_max"]],
                ["%.3g" % p for p in d["predicted"]],
            )
            for d in entries
        )
        + ("" if complete else " (pole set incomplete)"),
        "poles": entries,
    }
    plots = []
    if entries:
        first = entries[0]
        rows = [
            (n, v, first["predicted"][0] ** n)
            for n, v in zip(report.n_values, first["sequences"][0])
        ]
        plots = [
            ("derivative.csv", _csv(rows)),
            (
                "derivative.svg",
                render_decay_plot(
                    "|Q_n| at the forced pole %s" % _fmt_complex(first["xi"]),
                    report.n_values,
                    first["sequences"][0],
                    guide_rate=first["predicted"][0] or None,
                    guide_label="predicted rate %.4g" % first["predicted"][0],
                ),
            ),
        ]
    return entry, plots


def _check_incomplete(config, system):
    budget = config.incomplete
    f = system.functions[0]
    geometry = config.geometry
    n_lo = max(config.n_range[0], budget["m"])
    n_values, results, tracks = run_incomplete_sequence(
        f, geometry, config.table, n_lo, config.n_range[1], budget["m"], budget["m_star"]
    )
    reduced = SystemModel([f], (budget["m_star"],), geometry, config.table)
    targets = system_poles(reduced).poles
    rho_star = rho_meromorphy(f, geometry, budget["m_star"])

    target_entries = []
    used = set()
    all_ok = bool(targets)
    best_devs = None
    best_pred = 0.0
    for loc, order in targets:
        scored = [
            (t_idx, _last_known(track["locations"], loc))
            for t_idx, track in enumerate(tracks)
            if t_idx not in used and _last_known(track["locations"], loc) is not None
        ]
        if not scored:
            all_ok = False
            continue
        t_idx = min(scored, key=lambda s: s[1])[0]
        used.add(t_idx)
        deviations, fit = track_convergence(n_values, tracks[t_idx], loc)
        tail = [d for d in deviations if d is not None and math.isfinite(d)][-3:]
        converged = bool(tail) and all(d <= _CONVERGED_DEV for d in tail)
        pred = 0.0 if math.isinf(rho_star) else abs(phi(geometry, loc)) / rho_star
        if pred == 0.0:
            ok = converged
        else:
            ok = converged and fit is not None and fit.rate <= pred * 1.15
        all_ok = all_ok and ok
        target_entries.append(
            {
                "target": _fmt_complex([loc.real, loc.imag]),
                "track": t_idx,
                "fitted_rate": fit.rate if fit else None,
                "predicted_rate": pred,
                "converged": converged,
                "passed": ok,
            }
        )
        if best_devs is None:
            best_devs = deviations
            best_pred = pred

    stray = [t for i, t in enumerate(tracks) if i not in used]
    stray_ok = all(t["dispersion"] >= _DISPERSION_FLOOR for t in stray)
    converged_count = sum(1 for e in target_entries if e["converged"])
    count_ok = converged_count == sum(order for _, order in targets)
    passed = all_ok and stray_ok and count_ok
    entry = {
        "passed": passed,
        "summary": "%d/%d targets captured; %d stray track(s)"
        % (converged_count, len(targets), len(stray)),
        "targets": target_entries,
        "stray_dispersions": [t["dispersion"] for t in stray],
    }
    plots = []
    if best_devs is not None:
        rows = [
            (n, d if d is not None else float("nan"), best_pred ** n)
            for n, d in zip(n_values, best_devs)
        ]
        plots = [
            ("incomplete.csv", _csv(rows)),
            (
                "incomplete.svg",
                render_decay_plot(
                    "captured-root deviation vs n",
                    n_values,
                    [d if d is not None else float("nan") for d in best_devs],
                    guide_rate=best_pred or None,
                    guide_label="predicted rate %.4g" % best_pred,
                ),
            ),
        ]
    return entry, plots


def _check_independence(system):
    independent = polynomial_independence(system)
    return {
        "passed": bool(independent),
        "summary": "polynomially independent" if independent else "dependent system",
        "independent": bool(independent),
    }


def _last_known(locations, target):
    for loc in reversed(locations):
        if loc is not None:
            return abs(loc - target)
    return None


def _match_key(mapping, loc):
    for key in mapping:
        if abs(key - loc) <= 1e-8 * (1.0 + abs(loc)):
            return key
    raise KeyError(loc)


def _pole_set_dict(pole_set):
    return {
        "poles": [
            {"location": [loc.real, loc.imag], "order": order}
            for loc, order in pole_set.poles
        ],
        "Q_mf": [[c.real, c.imag] for c in pole_set.Q_mf.coefficients],
        "target_order": pole_set.target_order,
        "per_pole": [
            {
                "location": [key.real, key.imag],
                "R_xi_s": pole_set.per_pole[key]["R_xi_s"],
                "R_xi": pole_set.per_pole[key]["R_xi"],
            }
            for key in pole_set.per_pole
        ],
        "per_function": {
            str(k): {
                "R_k": entry["R_k"],
                "R_k_star": entry["R_k_star"],
                "poles_in_Dk": [
                    {"location": [loc.real, loc.imag], "order": order}
                    for loc, order in entry["poles_in_Dk"]
                ],
            }
            for k, entry in pole_set.per_function.items()
        },
    }


def _csv(rows):
    lines = ["n,value,reference"]
    for n, value, reference in rows:
        lines.append("%s,%s,%s" % (n, _fmt(value), _fmt(reference)))
    return "\n".join(lines) + "\n"


def _fmt(value):
    if value is None:
        return "nan"
    return "%.17e" % float(value)


def _fmt_complex(pair):
    if pair is None:
        return "?"
    return "%g%+gi" % (pair[0], pair[1])


def _cmd_list():
    try:
        base = resources.files("multipade").joinpath("examples")
        entries = sorted(
            (e for e in base.iterdir() if e.name.endswith(".toml")),
            key=lambda e: e.name,
        )
    except (OSError, ModuleNotFoundError) as exc:
        print("warning: cannot read bundled examples: %s" % exc, file=sys.stderr)
        return 0
    for item in entries:
        try:
            data = tomllib.loads(item.read_text())
            print(
                "%-24s %-16s %s"
                % (item.name, data.get("name", "?"), data.get("description", ""))
            )
        except Exception as exc:
            print("warning: %s: %s" % (item.name, exc), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
