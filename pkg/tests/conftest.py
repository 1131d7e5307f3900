import itertools
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


class MarkovSource:
    """Sparse bigram Markov generator with a Zipfian vocabulary.

    After each word the next one comes, with probability ``stick``, from a
    short list of preferred followers of that word; otherwise it is drawn
    from a global Zipf distribution, which supplies the long tail of rare
    words that real text has.  Two sources over disjoint word lists share
    nothing.
    """

    def __init__(self, vocab, seed, mean_len=6, stick=0.6, fanout=12):
        self.vocab = list(vocab)
        rng = random.Random(seed)
        self.mean_len = mean_len
        self.stick = stick
        self.zipf = list(itertools.accumulate(1 / (r + 1) for r in range(len(self.vocab))))
        head = self.vocab[:max(fanout, len(self.vocab) // 10)]
        self.follow = {}
        for w in ["<s>"] + self.vocab:
            nexts = rng.sample(head, min(fanout, len(head)))
            self.follow[w] = (nexts, [rng.random() ** 2 for _ in nexts])

    def sentence(self, rng):
        length = max(1, min(int(rng.expovariate(1 / self.mean_len)) + 1, 40))
        prev, out = "<s>", []
        for _ in range(length):
            if rng.random() < self.stick:
                nexts, weights = self.follow[prev]
                prev = rng.choices(nexts, weights=weights)[0]
            else:
                prev = rng.choices(self.vocab, cum_weights=self.zipf)[0]
            out.append(prev)
        return out

    def corpus(self, n_sentences, seed):
        rng = random.Random(seed)
        return [self.sentence(rng) for _ in range(n_sentences)]

    def corpus_tokens(self, n_tokens, seed):
        rng = random.Random(seed)
        out, total = [], 0
        while total < n_tokens:
            s = self.sentence(rng)
            out.append(s)
            total += len(s)
        return out


def words(prefix, n):
    return [f"{prefix}{i}" for i in range(n)]


def alpha_words(prefix, n):
    """Lowercase letter-only words, safe to pass through normalization."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    out = []
    for i in range(n):
        tail = ""
        while True:
            i, r = divmod(i, 26)
            tail = letters[r] + tail
            if not i:
                break
        out.append(prefix + tail)
    return out


@pytest.fixture
def source_a():
    return MarkovSource(words("w", 2000), seed=1)


@pytest.fixture
def source_b():
    return MarkovSource(words("z", 2000), seed=2)


# one summary line per acceptance criterion, printed after the test run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
