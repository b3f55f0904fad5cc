"""Download the UCI online-message stream and convert it to our CSV format.

The dataset is the KONECT ``opsahl-ucsocial`` network: private messages
between students of UC Irvine.  Each line of the raw file is

    src dst weight timestamp

separated by whitespace, with ``%`` comment lines at the top.  We drop the
weight, keep (src, dst, timestamp), and write ``data/uci.csv`` with a
header row.  Node ids are left as-is; the loader densifies them.

Run this on a machine with network access, then copy ``data/uci.csv``
next to the package checkout before running the acceptance gate.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

MIRRORS = (
    "http://konect.cc/files/download.tsv.opsahl-ucsocial.tar.bz2",
    "https://konect.cc/files/download.tsv.opsahl-ucsocial.tar.bz2",
)
MEMBER_SUFFIX = "out.opsahl-ucsocial"


def download(url: str, timeout: float = 120.0) -> bytes:
    print(f"fetching {url} ...")
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def extract_events(blob: bytes) -> list[tuple[int, int, float]]:
    """Pull (src, dst, t) triples out of the downloaded tarball."""
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:bz2") as tar:
        member = next((m for m in tar.getmembers()
                       if m.name.endswith(MEMBER_SUFFIX)), None)
        if member is None:
            names = ", ".join(m.name for m in tar.getmembers())
            raise RuntimeError(f"no {MEMBER_SUFFIX} in archive (found: {names})")
        raw = tar.extractfile(member).read().decode("utf-8")

    events = []
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if len(parts) < 4:
            raise RuntimeError(f"unexpected row: {line!r}")
        src, dst = int(parts[0]), int(parts[1])
        t = float(parts[3])
        events.append((src, dst, t))
    if not events:
        raise RuntimeError("archive contained no events")
    events.sort(key=lambda e: e[2])
    return events


def write_csv(events: list[tuple[int, int, float]], out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "t"])
        w.writerows(events)
    print(f"wrote {len(events)} events to {out}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).parent.parent / "data" / "uci.csv"))
    ap.add_argument("--url", default=None, help="override the download mirror")
    args = ap.parse_args(argv)

    urls = (args.url,) if args.url else MIRRORS
    blob, last_err = None, None
    for url in urls:
        try:
            blob = download(url)
            break
        except OSError as exc:
            last_err = exc
            print(f"  failed: {exc}", file=sys.stderr)
    if blob is None:
        print("all mirrors failed; download the archive manually and pass "
              "--url file:///path/to/archive", file=sys.stderr)
        raise SystemExit(1)

    write_csv(extract_events(blob), Path(args.out))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
