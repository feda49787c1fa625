"""Porter (1980) suffix-stripping stemmer, original rule set.

Operates on lower-case words. No short-word guard is applied, so two-letter
words such as ``"as"`` do reach step 1a.
"""

_VOWELS = frozenset("aeiou")


def _is_consonant(word, i):
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem):
    """Number of VC sequences in ``stem`` ([C](VC)^m[V])."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        vowel = not _is_consonant(stem, i)
        if prev_vowel and not vowel:
            m += 1
        prev_vowel = vowel
    return m


def _has_vowel(stem):
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word):
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word):
    if len(word) < 3:
        return False
    n = len(word)
    return (
        _is_consonant(word, n - 3)
        and not _is_consonant(word, n - 2)
        and _is_consonant(word, n - 1)
        and word[-1] not in "wxy"
    )


def _apply(word, rules):
    """Apply the longest matching rule; stop at the first suffix match."""
    for suffix, repl, cond in rules:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if cond(stem):
                return stem + repl
            return word
    return word


def _m_gt0(stem):
    return _measure(stem) > 0


def _m_gt1(stem):
    return _measure(stem) > 1


def _longest_first(rules):
    return sorted(rules, key=lambda r: -len(r[0]))


_STEP2 = _longest_first(
    [
        ("ational", "ate", _m_gt0),
        ("tional", "tion", _m_gt0),
        ("enci", "ence", _m_gt0),
        ("anci", "ance", _m_gt0),
        ("izer", "ize", _m_gt0),
        ("abli", "able", _m_gt0),
        ("alli", "al", _m_gt0),
        ("entli", "ent", _m_gt0),
        ("eli", "e", _m_gt0),
        ("ousli", "ous", _m_gt0),
        ("ization", "ize", _m_gt0),
        ("ation", "ate", _m_gt0),
        ("ator", "ate", _m_gt0),
        ("alism", "al", _m_gt0),
        ("iveness", "ive", _m_gt0),
        ("fulness", "ful", _m_gt0),
        ("ousness", "ous", _m_gt0),
        ("aliti", "al", _m_gt0),
        ("iviti", "ive", _m_gt0),
        ("biliti", "ble", _m_gt0),
    ]
)

_STEP3 = _longest_first(
    [
        ("icate", "ic", _m_gt0),
        ("ative", "", _m_gt0),
        ("alize", "al", _m_gt0),
        ("iciti", "ic", _m_gt0),
        ("ical", "ic", _m_gt0),
        ("ful", "", _m_gt0),
        ("ness", "", _m_gt0),
    ]
)

_STEP4 = _longest_first(
    [
        (s, "", _m_gt1)
        for s in (
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
            "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
        )
    ]
    + [("ion", "", lambda s: _measure(s) > 1 and s[-1:] in ("s", "t"))]
)


def _step1a(w):
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ies"):
        return w[:-2]
    if w.endswith("ss"):
        return w
    if w.endswith("s"):
        return w[:-1]
    return w


def _step1b(w):
    if w.endswith("eed"):
        return w[:-1] if _measure(w[:-3]) > 0 else w
    for suffix in ("ed", "ing"):
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if not _has_vowel(stem):
                return w
            return _step1b_cleanup(stem)
    return w


def _step1b_cleanup(w):
    if w.endswith(("at", "bl", "iz")):
        return w + "e"
    if _ends_double_consonant(w) and w[-1] not in "lsz":
        return w[:-1]
    if _measure(w) == 1 and _ends_cvc(w):
        return w + "e"
    return w


def _step1c(w):
    if w.endswith("y") and _has_vowel(w[:-1]):
        return w[:-1] + "i"
    return w


def _step5a(w):
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            return stem
    return w


def _step5b(w):
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        return w[:-1]
    return w


def stem(word):
    """Return the Porter stem of ``word``."""
    if not word:
        return word
    w = _step1a(word)
    w = _step1b(w)
    w = _step1c(w)
    w = _apply(w, _STEP2)
    w = _apply(w, _STEP3)
    w = _apply(w, _STEP4)
    w = _step5a(w)
    w = _step5b(w)
    return w
