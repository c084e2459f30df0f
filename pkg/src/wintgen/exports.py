"""File exports: CSV fields, OBJ point clouds/meshes, JSON reports."""
from __future__ import annotations

import json


def write_envelope_csv(env, path) -> None:
    """One row per sample: u, v, fiber coordinates, then the sphere point."""
    nu, nv, nt, d = env.xhat.shape
    with open(path, "w") as fh:
        fiber_cols = ["t"] if env.m == 3 else [f"theta{k}" for k in range(env.t.shape[1])]
        fh.write(",".join(["u", "v"] + fiber_cols + [f"x{k}" for k in range(d)]) + "\n")
        for i in range(nu):
            for j in range(nv):
                for k in range(nt):
                    fiber = [env.t[k]] if env.m == 3 else list(env.t[k])
                    row = [env.u[i], env.v[j], *fiber, *env.xhat[i, j, k]]
                    fh.write(",".join(repr(float(x)) for x in row) + "\n")


def write_envelope_obj(env, path) -> None:
    """OBJ projection to the first three coordinates, one mesh per fiber slice."""
    nu, nv, nt, _ = env.xhat.shape
    with open(path, "w") as fh:
        fh.write("# envelope projection (first three coordinates)\n")
        for k in range(nt):
            for i in range(nu):
                for j in range(nv):
                    x = env.xhat[i, j, k]
                    fh.write(f"v {x[0]!r} {x[1]!r} {x[2]!r}\n")
        for k in range(nt):
            base = k * nu * nv
            for i in range(nu - 1):
                for j in range(nv - 1):
                    a = base + i * nv + j + 1
                    b = a + 1
                    c = a + nv
                    dd = c + 1
                    fh.write(f"f {a} {b} {dd} {c}\n")


def write_mask_json(env, path) -> None:
    doc = {
        "regular": env.ok.astype(int).tolist(),
        "full_rank": env.rank_ok.astype(int).tolist(),
        "sigma_min": env.sigma_min.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)


def write_defect_csv(env, fields, path) -> None:
    nu, nv, nt = fields["defect"].shape
    with open(path, "w") as fh:
        fh.write("u,v,t,defect,mu0,recovery\n")
        for i in range(nu):
            for j in range(nv):
                for k in range(nt):
                    tcoord = env.t[k] if env.m == 3 else k
                    fh.write(
                        ",".join(
                            repr(float(x))
                            for x in (
                                env.u[i],
                                env.v[j],
                                tcoord,
                                fields["defect"][i, j, k],
                                fields["mu0"][i, j, k],
                                fields["recovery"][i, j, k],
                            )
                        )
                        + "\n"
                    )


def write_moebius_json(env, fields, path, checks=None) -> None:
    """Per-point invariant records (rho, B entries, residuals, optional C)."""
    nu, nv, nt = fields["defect"].shape
    recs = []
    for i in range(nu):
        for j in range(nv):
            for k in range(nt):
                rec = {
                    "u": float(env.u[i]),
                    "v": float(env.v[j]),
                    "fiber": float(env.t[k]) if env.m == 3 else int(k),
                    "ok": bool(fields["ok"][i, j, k]),
                    "rho": float(fields["rho"][i, j, k]),
                    "B": fields["b"][i, j, k].tolist(),
                    "b_trace_residual": float(fields["b_trace_residual"][i, j, k]),
                    "b_norm_residual": float(fields["b_norm_residual"][i, j, k]),
                    "defect": float(fields["defect"][i, j, k]),
                }
                if checks is not None:
                    rec["C"] = checks["c_tensor"][i, j, k].tolist()
                    rec["c_residuals"] = checks["c_residuals"][i, j, k].tolist()
                recs.append(rec)
    with open(path, "w") as fh:
        json.dump(recs, fh, sort_keys=True, indent=1)


def write_centers_csv(u, v, chart, path) -> None:
    nu, nv = chart.shape[:2]
    with open(path, "w") as fh:
        fh.write(",".join(["u", "v"] + [f"X{k}" for k in range(chart.shape[-1])]) + "\n")
        for i in range(nu):
            for j in range(nv):
                row = [u[i], v[j], *chart[i, j]]
                fh.write(",".join(repr(float(x)) for x in row) + "\n")


def write_centers_obj(chart, path) -> None:
    nu, nv = chart.shape[:2]
    with open(path, "w") as fh:
        fh.write("# center surface projection (first three coordinates)\n")
        for i in range(nu):
            for j in range(nv):
                x = chart[i, j]
                fh.write(f"v {x[0]!r} {x[1]!r} {x[2]!r}\n")
        for i in range(nu - 1):
            for j in range(nv - 1):
                a = i * nv + j + 1
                fh.write(f"f {a} {a + 1} {a + nv + 1} {a + nv}\n")


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
