"""Download the three benchmark tables into ``data/raw`` and verify them.

Each file is first requested from its original host. When that fails (for
example on machines that can only reach a Python package index) the same
bytes are taken from the ``responsibly`` 0.1.2 wheel, which ships verbatim
copies, fetched with ``pip download``. Every file is checked against a
pinned SHA-256 digest either way.

Usage::

    python scripts/fetch_data.py [--dest data/raw] [--no-upstream]
"""

import argparse
import hashlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
FILES = {
    "adult.data": (
        f"{UCI}/adult/adult.data",
        "responsibly/dataset/adult/adult.data",
        "5b00264637dbfec36bdeaab5676b0b309ff9eb788d63554ca0a249491c86603d",
    ),
    "adult.test": (
        f"{UCI}/adult/adult.test",
        "responsibly/dataset/adult/adult.test",
        "a2a9044bc167a35b2361efbabec64e89d69ce82d9790d2980119aac5fd7e9c05",
    ),
    "german.data": (
        f"{UCI}/statlog/german/german.data",
        "responsibly/dataset/german/german.data",
        "b21f3d81db8071257d5ff1deaeba1fd4303b62712e6fcc9715c7a86202cb5871",
    ),
    "compas-scores-two-years.csv": (
        "https://raw.githubusercontent.com/propublica/compas-analysis/master/"
        "compas-scores-two-years.csv",
        "responsibly/dataset/compas/compas-scores-two-years.csv",
        "c451db85908b2f7fef1d83203bedf6b71ecda0d5af468d82ae62178f91d0cc7d",
    ),
}
WHEEL_SPEC = "responsibly==0.1.2"


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def from_upstream(url, timeout=30):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def wheel_members():
    """Read the dataset copies out of the pinned wheel."""
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", WHEEL_SPEC, "--no-deps",
                        "--only-binary", ":all:", "-d", tmp, "-q"], check=True)
        wheel = next(Path(tmp).glob("*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            return {member: zf.read(member) for _, member, _ in FILES.values()}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", default="data/raw")
    parser.add_argument("--no-upstream", action="store_true",
                        help="skip the original hosts and use the wheel copies directly")
    args = parser.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)

    wheel = None
    failed = []
    for name, (url, member, digest) in FILES.items():
        target = dest / name
        if target.is_file() and sha256(target.read_bytes()) == digest:
            print(f"{name}: present, checksum ok")
            continue
        data = None
        if not args.no_upstream:
            try:
                data = from_upstream(url)
            except OSError as exc:
                print(f"{name}: upstream unavailable ({exc}); using wheel copy")
        if data is None or sha256(data) != digest:
            if wheel is None:
                wheel = wheel_members()
            data = wheel[member]
        if sha256(data) != digest:
            failed.append(name)
            print(f"{name}: checksum mismatch", file=sys.stderr)
            continue
        target.write_bytes(data)
        print(f"{name}: written ({len(data)} bytes)")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
