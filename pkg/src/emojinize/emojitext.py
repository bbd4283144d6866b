"""Unicode-correct grapheme segmentation and emoji validation.

Text is segmented into extended grapheme clusters (UAX #29) so that ZWJ
sequences, flag pairs, skin-tone modifier sequences and keycaps each count as
one unit, and clusters are classified as emoji / not-emoji (UTS #51). The
whole pipeline relies on this module to enforce "emoji only" on model output
and to count translation lengths.

All classification is driven by the pinned data files in data/unicode/ (see
the README there for versions); nothing depends on the host Python's Unicode
tables.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

ZWJ = "‍"
VS16 = "️"
KEYCAP = "⃣"
KEYCAP_BASES = set("0123456789#*")


class EmojiTextError(ValueError):
    pass


class EmptySequence(EmojiTextError):
    """No emoji content present where a translation was expected."""


class NonEmojiContent(EmojiTextError):
    """A cluster other than emoji or ASCII space separator was found."""

    def __init__(self, cluster: str):
        self.cluster = cluster
        super().__init__(f"not an emoji cluster: {cluster!r} ({_codepoints(cluster)})")


def _codepoints(s: str) -> str:
    return " ".join(f"U+{ord(c):04X}" for c in s)


class _RangeSet:
    """Sorted, disjoint codepoint ranges with bisect membership lookup."""

    def __init__(self, ranges: list[tuple[int, int]]):
        self._ranges = sorted(ranges)
        self._starts = [lo for lo, _ in self._ranges]

    def __contains__(self, cp: int) -> bool:
        i = bisect_right(self._starts, cp)
        return i > 0 and self._ranges[i - 1][1] >= cp


def _parse_range_file(text: str) -> dict[str, list[tuple[int, int]]]:
    table: dict[str, list[tuple[int, int]]] = {}
    for line in text.splitlines():
        line = line.split("#")[0].strip()
        if not line:
            continue
        span, name = (part.strip() for part in line.split(";"))
        lo, hi = (int(cp, 16) for cp in span.split(".."))
        table.setdefault(name, []).append((lo, hi))
    return table


# grapheme cluster break classes (integers for the segmenter's dispatch)
(
    GCB_OTHER,
    GCB_CR,
    GCB_LF,
    GCB_CONTROL,
    GCB_EXTEND,
    GCB_ZWJ,
    GCB_RI,
    GCB_PREPEND,
    GCB_SPACINGMARK,
    GCB_L,
    GCB_V,
    GCB_T,
    GCB_LV,
    GCB_LVT,
    GCB_EXT_PICT,
    GCB_INCB_CONSONANT,
) = range(16)

_GCB_NAMES = {
    "CR": GCB_CR,
    "LF": GCB_LF,
    "Control": GCB_CONTROL,
    "Extend": GCB_EXTEND,
    "ZWJ": GCB_ZWJ,
    "Regional_Indicator": GCB_RI,
    "Prepend": GCB_PREPEND,
    "SpacingMark": GCB_SPACINGMARK,
    "L": GCB_L,
    "V": GCB_V,
    "T": GCB_T,
    "LV": GCB_LV,
    "LVT": GCB_LVT,
    "Extended_Pictographic": GCB_EXT_PICT,
    "InCB_Consonant": GCB_INCB_CONSONANT,
}


class _UnicodeData:
    def __init__(self) -> None:
        data = resources.files("emojinize.data.unicode")

        table = _parse_range_file((data / "grapheme_break_properties.txt").read_text("utf-8"))
        ranges: list[tuple[int, int, int]] = []
        for name, cls in _GCB_NAMES.items():
            ranges.extend((lo, hi, cls) for lo, hi in table.get(name, []))
        ranges.sort()
        self._gcb_ranges = ranges
        self._gcb_starts = [lo for lo, _, _ in ranges]
        self.incb_extend = _RangeSet(table["InCB_Extend"])
        self.incb_linker = _RangeSet(table["InCB_Linker"])

        props = _parse_range_file((data / "emoji_properties.txt").read_text("utf-8"))
        self.emoji = _RangeSet(props["Emoji"])
        self.emoji_presentation = _RangeSet(props["Emoji_Presentation"])
        self.emoji_modifier = _RangeSet(props["Emoji_Modifier"])
        self.emoji_modifier_base = _RangeSet(props["Emoji_Modifier_Base"])
        self.emoji_component = _RangeSet(props["Emoji_Component"])

        # emoji-test.txt: sequence -> (status, name); RGI inventory in file order
        self.sequence_status: dict[str, str] = {}
        self.rgi: list[tuple[str, str]] = []
        pattern = re.compile(
            r"^(?P<cps>[0-9A-F ]+?)\s*;\s*(?P<status>[\w-]+)\s*#\s*\S+\s+E\d+\.\d+\s+(?P<name>.+)$"
        )
        for line in (data / "emoji-test.txt").read_text("utf-8").splitlines():
            m = pattern.match(line.strip())
            if not m:
                continue
            seq = "".join(chr(int(cp, 16)) for cp in m.group("cps").split())
            status = m.group("status")
            self.sequence_status[seq] = status
            if status == "fully-qualified":
                self.rgi.append((seq, m.group("name")))

    def gcb_class(self, cp: int) -> int:
        i = bisect_right(self._gcb_starts, cp)
        if i > 0:
            lo, hi, cls = self._gcb_ranges[i - 1]
            if hi >= cp:
                return cls
        return GCB_OTHER


@lru_cache(maxsize=1)
def _data() -> _UnicodeData:
    return _UnicodeData()


_LINK = {GCB_L: (GCB_L, GCB_V, GCB_LV, GCB_LVT), GCB_LV: (GCB_V, GCB_T), GCB_V: (GCB_V, GCB_T), GCB_LVT: (GCB_T,), GCB_T: (GCB_T,)}

# GB11 suffix states: ... Extended_Pictographic Extend* (ZWJ?)
_EP_NONE, _EP_PICT, _EP_ZWJ = range(3)
# GB9c suffix states: ... InCB_Consonant [Extend|Linker]* with/without a Linker
_INCB_NONE, _INCB_CONS, _INCB_LINK = range(3)


def _segment(text: str) -> list[str]:
    """Split text into extended grapheme clusters per UAX #29 (GB1-GB999)."""
    if not text:
        return []
    data = _data()
    cls = data.gcb_class
    clusters: list[str] = []
    start = 0

    c1 = ord(text[0])
    k1 = cls(c1)
    ri_run = 1 if k1 == GCB_RI else 0
    ep = _EP_PICT if k1 == GCB_EXT_PICT else _EP_NONE
    incb = _INCB_CONS if k1 == GCB_INCB_CONSONANT else _INCB_NONE

    for i in range(1, len(text)):
        c2 = ord(text[i])
        k2 = cls(c2)

        if k1 == GCB_CR and k2 == GCB_LF:  # GB3
            brk = False
        elif k1 in (GCB_CONTROL, GCB_CR, GCB_LF):  # GB4
            brk = True
        elif k2 in (GCB_CONTROL, GCB_CR, GCB_LF):  # GB5
            brk = True
        elif k1 in _LINK and k2 in _LINK.get(k1, ()):  # GB6-GB8
            brk = False
        elif k2 in (GCB_EXTEND, GCB_ZWJ):  # GB9
            brk = False
        elif k2 == GCB_SPACINGMARK:  # GB9a
            brk = False
        elif k1 == GCB_PREPEND:  # GB9b
            brk = False
        elif incb == _INCB_LINK and k2 == GCB_INCB_CONSONANT:  # GB9c
            brk = False
        elif ep == _EP_ZWJ and k2 == GCB_EXT_PICT:  # GB11
            brk = False
        elif k1 == GCB_RI and k2 == GCB_RI and ri_run % 2 == 1:  # GB12/GB13
            brk = False
        else:  # GB999
            brk = True

        if brk:
            clusters.append(text[start:i])
            start = i

        ri_run = ri_run + 1 if k2 == GCB_RI else 0
        if k2 == GCB_EXT_PICT:
            ep = _EP_PICT
        elif ep == _EP_PICT and k2 == GCB_EXTEND:
            ep = _EP_PICT
        elif ep == _EP_PICT and k2 == GCB_ZWJ:
            ep = _EP_ZWJ
        else:
            ep = _EP_NONE
        if k2 == GCB_INCB_CONSONANT:
            incb = _INCB_CONS
        elif incb == _INCB_CONS and c2 in data.incb_linker:
            incb = _INCB_LINK
        elif incb == _INCB_LINK and (c2 in data.incb_linker or c2 in data.incb_extend):
            incb = _INCB_LINK
        elif incb == _INCB_CONS and c2 in data.incb_extend:
            incb = _INCB_CONS
        else:
            incb = _INCB_NONE

        c1, k1 = c2, k2

    clusters.append(text[start:])
    return clusters


@dataclass(frozen=True)
class GraphemeCluster:
    """One extended grapheme cluster (a user-perceived character)."""

    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise EmojiTextError("empty grapheme cluster")
        if len(_segment(self.text)) != 1:
            raise EmojiTextError(f"not a single grapheme cluster: {self.text!r}")

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class EmojiSequence:
    """A validated sequence of emoji clusters; equality ignores the raw text."""

    clusters: tuple[GraphemeCluster, ...]
    raw: str = field(compare=False)

    def __str__(self) -> str:
        return "".join(c.text for c in self.clusters)


def segment_graphemes(text: str) -> list[GraphemeCluster]:
    """Segment text into extended grapheme clusters; empty input gives []."""
    return [GraphemeCluster(c) for c in _segment(text)]


def _is_emoji_element(cps: list[int]) -> bool:
    """One element of a ZWJ sequence: emoji char, optional VS16, or modifier seq."""
    d = _data()
    if len(cps) == 1:
        return cps[0] in d.emoji and cps[0] not in d.emoji_component
    if len(cps) == 2 and cps[1] == ord(VS16):
        return cps[0] in d.emoji
    if len(cps) == 2:
        return cps[0] in d.emoji_modifier_base and cps[1] in d.emoji_modifier
    return False


def is_emoji_cluster(cluster: GraphemeCluster | str) -> bool:
    """True iff the cluster is an emoji per UTS #51.

    Accepts RGI sequences (and their minimally-/un-qualified variants listed
    in the pinned emoji-test data, which double as the allowlist of bare
    default-text pictographs such as dove or heart), plus structurally valid
    ZWJ sequences, modifier sequences, flag pairs and keycaps. Bare component
    code points (skin tones, lone regional indicators, digits) are not emoji.
    """
    text = cluster.text if isinstance(cluster, GraphemeCluster) else cluster
    d = _data()

    status = d.sequence_status.get(text)
    if status is not None:
        return status != "component"

    cps = [ord(c) for c in text]
    if len(cps) == 1:
        cp = cps[0]
        return cp in d.emoji_presentation and cp not in d.emoji_component
    if len(cps) == 3 and cps[1] == ord(VS16) and cps[2] == ord(KEYCAP):
        return chr(cps[0]) in KEYCAP_BASES
    if len(cps) == 2 and all(0x1F1E6 <= cp <= 0x1F1FF for cp in cps):
        return True
    if ZWJ in text:
        elements = [[ord(c) for c in part] for part in text.split(ZWJ)]
        return all(element and _is_emoji_element(element) for element in elements)
    return _is_emoji_element(cps)


def parse_emoji_sequence(text: str) -> EmojiSequence:
    """Validate text as emoji-only (ASCII spaces between clusters allowed).

    Raises EmptySequence when nothing but separators remains, NonEmojiContent
    on the first cluster that is neither an emoji nor an ASCII space. Both
    mean: reject the model reply and resample.
    """
    clusters = []
    for part in _segment(text):
        if part == " ":
            continue
        if not is_emoji_cluster(part):
            raise NonEmojiContent(part)
        clusters.append(GraphemeCluster(part))
    if not clusters:
        raise EmptySequence(f"no emoji in {text!r}")
    return EmojiSequence(clusters=tuple(clusters), raw=text)


def emoji_count(seq: EmojiSequence) -> int:
    """Number of emoji in a translation; a ZWJ family or flag counts as one."""
    return len(seq.clusters)


def rgi_inventory() -> list[tuple[str, str]]:
    """The pinned RGI emoji list in CLDR order, each with its canonical name."""
    return list(_data().rgi)
