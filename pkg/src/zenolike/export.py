"""File output: atomic writes, scan CSV and JSON reports."""
import json
import os
import tempfile

import numpy as np

SCAN_HEADER = ("idx,g,dtf,dtm,det_x,det_y,det_z,"
               "re_l0,im_l0,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,"
               "fp_x,fp_y,fp_z,min_gap,defective")


def _fmt(x):
    # '%' formatting ignores the process locale; 17 significant digits round-trip a double
    return "%.17g" % x


def write_atomic(path, data):
    """Write ``data`` (str or bytes) to ``path`` via a temporary file and rename.

    The destination either keeps its old content or holds the complete new
    content; a partially written file is never visible.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    payload = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def scan_csv(result, flagged_only=False):
    """Render a :class:`~zenolike.fixedpoint.ScanResult` as CSV text, one row per point in index order."""
    rows = [SCAN_HEADER]
    idx = result.flagged_indices if flagged_only else range(len(result))
    for k in idx:
        vals = result.eigenvalues[k]
        fields = [str(int(k))]
        fields += [_fmt(v) for v in result.params[k]]
        fields += [_fmt(v) for v in result.detectors[k]]
        for z in vals:
            fields += [_fmt(z.real), _fmt(z.imag)]
        fields += [_fmt(v) for v in result.fixed_points[k]]
        fields.append(_fmt(result.min_gap[k]))
        fields.append("1" if result.defective[k] else "0")
        rows.append(",".join(fields))
    return "\n".join(rows) + "\n"


def read_scan_csv(path):
    """Load a scan CSV back into a dict of numpy columns."""
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    return {name: data[name] for name in data.dtype.names}


def json_text(obj):
    from .reconcile import jsonable
    return json.dumps(jsonable(obj), indent=2, sort_keys=False, allow_nan=True) + "\n"


def write_json(path, obj):
    write_atomic(path, json_text(obj))


def trajectory_csv(traj, ref):
    """``n,x,y,z,trace_distance`` rows for a stack of 2x2 states."""
    from .model import bloch_vector
    from .spectra import trace_distance_series
    b = bloch_vector(traj)
    d = trace_distance_series(traj, ref)
    rows = ["n,x,y,z,trace_distance"]
    for n in range(len(traj)):
        rows.append(",".join([str(n)] + [_fmt(v) for v in b[n]] + [_fmt(d[n])]))
    return "\n".join(rows) + "\n"
