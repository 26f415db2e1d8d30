"""Readers and writers for every file the command line consumes or emits.

All writers go through :func:`atomic_write_text` (temp file + rename).
Floats are written with ``repr`` so re-reading yields identical values.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from PIL import Image

from .featurize import AccountSnapshot, Interactions, ZScoreStats
from .learn import SIGN_CONVENTION, ConstantModel, KernelModel, LinearModel
from .model import FriendSpec, SearchDomainError, SearchInstance
from .policy import GroundTruth, Policy, PolicyReport
from .similarity import MatchModel, ProfileRecord

FORMAT_VERSION = 1


class FormatError(ValueError):
    """A file could not be parsed; the message names the line or field."""


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None


def _float_out(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _float_in(x) -> float:
    return float(x)


# --- search instances ------------------------------------------------------

def _field(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}.{key}: missing")
    val = obj[key]
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise FormatError(f"{where}.{key}: expected an integer, got {val!r}")
    elif kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise FormatError(f"{where}.{key}: expected a number, got {val!r}")
        val = float(val)
    return val


def instance_to_dict(instance: SearchInstance) -> dict:
    return {
        "friends": [{"id": f.id, "followers": f.follower_count, "phi": f.phi} for f in instance.friends],
        "page_size": instance.page_size,
        "rho0": instance.rho0,
        "rho_bar": instance.rho_bar,
    }


def instance_from_dict(d) -> SearchInstance:
    if not isinstance(d, dict):
        raise FormatError("instance: expected an object")
    friends_raw = d.get("friends")
    if not isinstance(friends_raw, list):
        raise FormatError("instance.friends: expected a list")
    friends = []
    for k, item in enumerate(friends_raw):
        where = f"instance.friends[{k}]"
        fid = _field(item, "id", None, where)
        if not isinstance(fid, (str, int)) or isinstance(fid, bool):
            raise FormatError(f"{where}.id: expected a string or integer")
        try:
            friends.append(FriendSpec(fid, _field(item, "followers", int, where), _field(item, "phi", float, where)))
        except SearchDomainError as exc:
            raise FormatError(f"{where}: {exc}") from None
    try:
        return SearchInstance(
            tuple(friends),
            page_size=_field(d, "page_size", int, "instance"),
            rho0=_field(d, "rho0", float, "instance"),
            rho_bar=_field(d, "rho_bar", float, "instance") if "rho_bar" in d else 0.0,
        )
    except SearchDomainError as exc:
        raise FormatError(f"instance: {exc}") from None


def save_instance(path, instance: SearchInstance) -> None:
    write_json(path, instance_to_dict(instance))


def load_instance(path) -> SearchInstance:
    return instance_from_dict(read_json(path))


# --- policies, truths ------------------------------------------------------

def report_to_dict(report: PolicyReport) -> dict:
    out = {"name": report.name, "policy": list(report.policy.sequence), "expected_cost": report.expected_cost}
    if report.gamma_trace is not None:
        out["gamma_trace"] = [_float_out(g) for g in report.gamma_trace]
    return out


def report_from_dict(d) -> PolicyReport:
    trace = d.get("gamma_trace")
    return PolicyReport(
        Policy(tuple(d["policy"])),
        float(d["expected_cost"]),
        None if trace is None else tuple(_float_in(g) for g in trace),
        d.get("name", ""),
    )


def truth_from_dict(d) -> GroundTruth:
    if not isinstance(d, dict) or not isinstance(d.get("reconnected"), list):
        raise FormatError("truth.reconnected: expected a list")
    return GroundTruth(frozenset(d["reconnected"]), bool(d.get("exists", True)))


def truth_to_dict(t: GroundTruth) -> dict:
    return {"reconnected": sorted(t.reconnected), "exists": t.exists}


# --- profiles and images ---------------------------------------------------

def read_pgm(path) -> np.ndarray:
    """8-bit portable graymap, plain (P2) or binary (P5)."""
    try:
        with Image.open(path) as im:
            if im.format != "PPM" or im.mode != "L":
                raise FormatError(f"{path}: not an 8-bit portable graymap")
            return np.asarray(im, dtype=np.uint8).copy()
    except (OSError, SyntaxError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_pgm(path, raster) -> None:
    arr = np.asarray(raster, dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PPM")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(buf.getvalue())


def _picture(rec, key, base: Path, where):
    path_val = rec.get(key)
    hash_val = rec.get(key.replace("_picture", "_hash"))
    if hash_val is not None:
        try:
            return int(str(hash_val), 16)
        except ValueError:
            raise FormatError(f"{where}: {key.replace('_picture', '_hash')} is not hexadecimal") from None
    if path_val is None:
        return None
    if not isinstance(path_val, str):
        raise FormatError(f"{where}: {key} must be a path string or null")
    return read_pgm(base / path_val)


def read_profiles(path) -> list[ProfileRecord]:
    """Line-delimited JSON profile records; picture paths resolve next to the file."""
    path = Path(path)
    base = path.parent
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path}: line {lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{where}: {exc.msg}") from None
            if not isinstance(rec, dict):
                raise FormatError(f"{where}: expected an object")
            for key in ("user_id", "screen_name", "name"):
                if key not in rec:
                    raise FormatError(f"{where}: missing {key}")
            if not isinstance(rec["screen_name"], str) or not isinstance(rec["name"], str):
                raise FormatError(f"{where}: screen_name and name must be strings")
            out.append(ProfileRecord(
                rec["user_id"], rec["screen_name"], rec["name"],
                _picture(rec, "profile_picture", base, where),
                _picture(rec, "banner_picture", base, where),
            ))
    return out


def write_profiles(path, profiles: Iterable[ProfileRecord]) -> None:
    """Write profiles with pictures stored as hexadecimal average hashes."""
    from .similarity import _fingerprint

    lines = []
    for p in profiles:
        rec = {"user_id": p.user_id, "screen_name": p.screen_name, "name": p.name}
        for key, pic in (("profile_hash", p.profile_picture), ("banner_hash", p.banner_picture)):
            fp = _fingerprint(pic)
            rec[key] = None if fp is None else f"{fp:016x}"
        lines.append(json.dumps(rec, ensure_ascii=False))
    atomic_write_text(path, "".join(line + "\n" for line in lines))


# --- models ----------------------------------------------------------------

def model_to_dict(model, scaler: ZScoreStats | None = None, kind: str = "") -> dict:
    out = {"format": "suspended-search-model", "version": FORMAT_VERSION, "link": SIGN_CONVENTION, "task": kind}
    if isinstance(model, LinearModel):
        out.update(type="linear", feature_names=list(model.feature_names), intercept=float(model.intercept),
                   coefficients=[float(c) for c in model.coefficients], lam=model.lam)
    elif isinstance(model, KernelModel):
        out.update(type="kernel", feature_names=list(model.feature_names),
                   support_points=model.support_points.tolist(),
                   alphas=[float(a) for a in model.alphas], lam=model.lam, kernel="(1+x.y)^2")
    elif isinstance(model, MatchModel):
        out.update(type="match", intercept=model.intercept, coefficients=list(model.coefficients),
                   threshold=model.threshold)
    elif isinstance(model, ConstantModel):
        out.update(type="constant", probability=model.probability)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    if scaler is not None:
        out["scaler"] = scaler.to_dict()
    return out


def model_from_dict(d):
    """Return ``(model, scaler_or_None)``."""
    if not isinstance(d, dict) or d.get("format") != "suspended-search-model":
        raise FormatError("model: unrecognized format tag")
    if d.get("version") != FORMAT_VERSION:
        raise FormatError(f"model: unsupported version {d.get('version')!r}")
    if d.get("link", SIGN_CONVENTION) != SIGN_CONVENTION:
        raise FormatError(f"model: unsupported link {d.get('link')!r}")
    kind = d.get("type")
    try:
        if kind == "linear":
            model = LinearModel(float(d["intercept"]), np.asarray(d["coefficients"], dtype=float),
                                float(d["lam"]), list(d["feature_names"]))
        elif kind == "kernel":
            model = KernelModel(np.asarray(d["support_points"], dtype=float), np.asarray(d["alphas"], dtype=float),
                                float(d["lam"]), list(d["feature_names"]))
        elif kind == "match":
            model = MatchModel(float(d["intercept"]), tuple(d["coefficients"]), float(d["threshold"]))
        elif kind == "constant":
            model = ConstantModel(float(d["probability"]))
        else:
            raise FormatError(f"model.type: unknown {kind!r}")
    except KeyError as exc:
        raise FormatError(f"model.{exc.args[0]}: missing") from None
    scaler = ZScoreStats.from_dict(d["scaler"]) if d.get("scaler") else None
    return model, scaler


def save_model(path, model, scaler=None, kind: str = "") -> None:
    write_json(path, model_to_dict(model, scaler, kind))


def load_model(path):
    return model_from_dict(read_json(path))


# --- numeric matrices ------------------------------------------------------

def write_matrix(path, X, feature_names, labels=None, groups=None) -> None:
    """Comma-delimited numeric table with a header row of column names."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    header = list(feature_names)
    if labels is not None:
        header.append("label")
    if groups is not None:
        header.append("group")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for k, row in enumerate(X):
        cells = [repr(float(v)) for v in row]
        if labels is not None:
            cells.append(repr(float(labels[k])))
        if groups is not None:
            cells.append(str(groups[k]))
        w.writerow(cells)
    atomic_write_text(path, buf.getvalue())


def read_matrix(path):
    """Return ``(X, feature_names, labels_or_None, groups_or_None)``."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = rows[0]
    has_label = "label" in header
    has_group = "group" in header
    names = [h for h in header if h not in ("label", "group")]
    feat_idx = [header.index(h) for h in names]
    X = np.empty((len(rows) - 1, len(names)))
    labels = np.empty(len(rows) - 1) if has_label else None
    groups = [] if has_group else None
    for r, row in enumerate(rows[1:]):
        lineno = r + 2
        if len(row) != len(header):
            raise FormatError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            X[r] = [float(row[k]) for k in feat_idx]
            if has_label:
                labels[r] = float(row[header.index("label")])
        except ValueError as exc:
            raise FormatError(f"{path}: line {lineno}: {exc}") from None
        if has_group:
            groups.append(row[header.index("group")])
    return X, names, labels, groups


# --- accounts, edges, interactions -----------------------------------------

ACCOUNT_COLUMNS = ("id", "created_at", "friends_count", "followers_count", "tweet_count", "favorites_count",
                   "retweet_count", "geo_enabled", "protected", "verified", "language", "active")


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "y", "t"):
        return True
    if v in ("0", "false", "no", "n", "f", ""):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def read_accounts(path) -> dict:
    """Accounts sidecar: id -> (AccountSnapshot, active flag)."""
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("id", "followers_count") if c not in (reader.fieldnames or [])]
        if missing:
            raise FormatError(f"{path}: missing columns {missing}")
        for lineno, rec in enumerate(reader, 2):
            try:
                get = lambda k, d="0": rec.get(k) if rec.get(k) not in (None, "") else d  # noqa: E731
                created = get("created_at", "0")
                try:
                    created = float(created)
                except ValueError:
                    pass
                snap = AccountSnapshot(
                    account_id=rec["id"],
                    created_at=created,
                    friends_count=int(get("friends_count")),
                    followers_count=int(get("followers_count")),
                    tweet_count=int(get("tweet_count")),
                    favorites_count=int(get("favorites_count")),
                    retweet_count=int(get("retweet_count")),
                    geo_enabled=_bool(get("geo_enabled")),
                    protected=_bool(get("protected")),
                    verified=_bool(get("verified")),
                    language=rec.get("language") or "",
                )
                active = _bool(get("active", "1"))
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from None
            out[rec["id"]] = (snap, active)
    return out


def read_edges(path) -> list[tuple[str, str]]:
    """``follower_id,friend_id`` rows; a header row is optional."""
    edges = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            if lineno == 1 and [c.strip() for c in row] == ["follower_id", "friend_id"]:
                continue
            if len(row) != 2:
                raise FormatError(f"{path}: line {lineno}: expected follower_id,friend_id")
            edges.append((row[0].strip(), row[1].strip()))
    return edges


def read_interactions(path) -> dict:
    """``user0_id,friend_id,mentions,retweets,replies`` -> {(user0, friend): Interactions}."""
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, rec in enumerate(csv.DictReader(fh), 2):
            try:
                out[(rec["user0_id"], rec["friend_id"])] = Interactions(
                    int(rec.get("mentions") or 0), int(rec.get("retweets") or 0), int(rec.get("replies") or 0))
            except (KeyError, ValueError) as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from None
    return out
