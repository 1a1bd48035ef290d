#!/usr/bin/env python3
# Copyright 2026 The gridauth Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Regenerates the golden outputs from the inputs in this directory using only
# the Python standard library, so the expected bytes never come from gridauth.
import json
import pathlib

here = pathlib.Path(__file__).parent


def unescape(line):
    # Inputs spell non-ASCII bytes as \xhh so the files stay 7-bit.
    return line.encode("ascii").decode("unicode_escape").encode("latin-1")


def canonical(value):
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def encode_subject(raw):
    out = []
    for b in raw:
        if 0x41 <= b <= 0x5A:
            b += 0x20
        if 0x61 <= b <= 0x7A or 0x30 <= b <= 0x39:
            out.append(chr(b))
        else:
            out.append("%%%02x" % b)
    return "".join(out)


doc = json.loads((here / "document.json").read_text(encoding="utf-8"))
(here / "canonical.golden").write_bytes(canonical(doc).encode("utf-8"))

entries = []
for line in (here / "gridmap_entries.tsv").read_text().splitlines():
    subject, target = line.split("\t")
    entries.append((unescape(subject), target.encode()))
entries.sort()
(here / "gridmap.golden").write_bytes(b"".join(b'"' + s + b'" ' + t + b"\n" for s, t in entries))

subjects = [unescape(l) for l in (here / "subjects.txt").read_text().splitlines()]
(here / "subject_encoding.golden").write_text("".join(encode_subject(s) + "\n" for s in subjects))
