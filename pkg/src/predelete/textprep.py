"""Text normalization and whitespace tokenization feeding featurization.

Rules run in a fixed order on every text:

1. URL spans (``http://``/``https://`` prefixed, or bare ``t.co/...``,
   ending at whitespace) become ``url_token``.
2. ``@`` mentions (``@`` + word characters) become ``user_token``.
3. ``#`` characters are deleted.
4. Every character that is not a Unicode letter (category L*), decimal digit
   (Nd), or space becomes a single space. Replacement tokens are atomic and
   exempt from rules 3-5.
5. Whitespace runs collapse to one space; the result is trimmed.

Optional extras, both off by default: ``fold_case`` (casefold, applied before
rule 4 so any combining marks it introduces are stripped) and
``normalize_arabic`` (alef/teh-marbuta/alef-maqsura variants, tatweel removal,
applied first). Serving-time preprocessing stays bit-identical to training
because the config travels inside the model bundle.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .errors import DataError

TokenSequence = list[str]

_URL_RE = re.compile(r"(?:https?://\S*|\bt\.co/\S*)")
_MENTION_RE = re.compile(r"@\w+")

_ARABIC_MAP = str.maketrans(
    {
        "أ": "ا",  # alef hamza above -> alef
        "إ": "ا",  # alef hamza below -> alef
        "آ": "ا",  # alef madda -> alef
        "ٱ": "ا",  # alef wasla -> alef
        "ة": "ه",  # teh marbuta -> heh
        "ى": "ي",  # alef maqsura -> yeh
        "ـ": None,  # tatweel removed
    }
)


@dataclass(frozen=True)
class NormalizationConfig:
    replace_urls: bool = True
    replace_mentions: bool = True
    strip_hash_symbol: bool = True
    strip_non_alphanumeric: bool = True
    url_token: str = "URL"
    user_token: str = "USER"
    fold_case: bool = False
    normalize_arabic: bool = False

    def __post_init__(self):
        for name in ("url_token", "user_token"):
            token = getattr(self, name)
            if not token or any(ch.isspace() for ch in token):
                raise DataError(f"{name} must be non-empty and contain no whitespace")

    def to_dict(self) -> dict:
        return {
            "replace_urls": self.replace_urls,
            "replace_mentions": self.replace_mentions,
            "strip_hash_symbol": self.strip_hash_symbol,
            "strip_non_alphanumeric": self.strip_non_alphanumeric,
            "url_token": self.url_token,
            "user_token": self.user_token,
            "fold_case": self.fold_case,
            "normalize_arabic": self.normalize_arabic,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "NormalizationConfig":
        return cls(**obj)


DEFAULT_CONFIG = NormalizationConfig()


def _keep_char(ch: str) -> bool:
    if ch == " ":
        return True
    cat = unicodedata.category(ch)
    return cat[0] == "L" or cat == "Nd"


def _substitute(segments: list[tuple[bool, str]], pattern: re.Pattern, token: str):
    """Replace pattern matches inside literal segments with atomic token segments."""
    out: list[tuple[bool, str]] = []
    for is_token, payload in segments:
        if is_token:
            out.append((is_token, payload))
            continue
        pos = 0
        for match in pattern.finditer(payload):
            if match.start() > pos:
                out.append((False, payload[pos : match.start()]))
            out.append((True, token))
            pos = match.end()
        if pos < len(payload):
            out.append((False, payload[pos:]))
    return out


def normalize(text: str, config: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Apply the normalization rules in order.

    Idempotent whenever each replacement token is a fixed point of the rules,
    which holds for the default config (with ``fold_case`` the tokens must
    already be lowercase).
    """
    segments: list[tuple[bool, str]] = [(False, text)]
    if config.replace_urls:
        segments = _substitute(segments, _URL_RE, config.url_token)
    if config.replace_mentions:
        segments = _substitute(segments, _MENTION_RE, config.user_token)
    pieces = []
    for is_token, payload in segments:
        if is_token:
            pieces.append(payload)
            continue
        s = payload
        if config.normalize_arabic:
            s = s.translate(_ARABIC_MAP)
        if config.fold_case:
            s = s.casefold()
        if config.strip_hash_symbol:
            s = s.replace("#", "")
        if config.strip_non_alphanumeric:
            s = "".join(ch if _keep_char(ch) else " " for ch in s)
        pieces.append(s)
    return " ".join("".join(pieces).split())


def tokenize(text: str) -> TokenSequence:
    """Split on whitespace runs, preserving order; empty input gives []."""
    return text.split()
