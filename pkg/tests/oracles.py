"""Independent reference implementations used only by the tests.

These are deliberately naive: literal string rewriting, memoized recursion,
pair counting. None of them share code with the package.
"""
import math
import re
from collections import Counter
from functools import lru_cache


def description_length(symbols):
    counts = Counter(symbols)
    n = len(symbols)
    return -n * sum(c / n * math.log2(c / n) for c in counts.values())


def literal_rewrite(symbols, candidate, fresh="<r>"):
    out, i, k = [], 0, len(candidate)
    cand = list(candidate)
    while i < len(symbols):
        if list(symbols[i:i + k]) == cand:
            out.append(fresh)
            i += k
        else:
            out.append(symbols[i])
            i += 1
    return out + cand


def dlg(symbols, candidate):
    return description_length(symbols) - description_length(literal_rewrite(symbols, candidate))


def levenshtein(a, b):
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def strip_maps(mol):
    """Character-level: drop ':digits' inside brackets, then unwrap plain organic atoms."""
    out, inside, i = [], False, 0
    while i < len(mol):
        ch = mol[i]
        if ch == "[":
            inside = True
        elif ch == "]":
            inside = False
        elif inside and ch == ":":
            j = i + 1
            while j < len(mol) and mol[j].isdigit():
                j += 1
            if j > i + 1:
                i = j
                continue
        out.append(ch)
        i += 1
    text = "".join(out)
    return re.sub(r"\[(Cl|Br|B|C|N|O|P|S|F|I|b|c|n|o|p|s)(H\d*)?\]", r"\1", text)


def pair_auc(preds):
    pos = [p for p, y in preds if y]
    neg = [p for p, y in preds if not y]
    wins = 0.0
    for a in pos:
        for b in neg:
            wins += 1.0 if a > b else 0.5 if a == b else 0.0
    return wins / (len(pos) * len(neg))


def hand_count(preds, threshold):
    tp = sum(1 for p, y in preds if y == 1 and p >= threshold)
    fn = sum(1 for p, y in preds if y == 1 and p < threshold)
    fp = sum(1 for p, y in preds if y == 0 and p >= threshold)
    tn = sum(1 for p, y in preds if y == 0 and p < threshold)
    return tp, fn, fp, tn


def scalar_lstm_step(x, h, c, W_x, W_h, b):
    """Element-by-element LSTM step on plain Python lists (gate order i, f, o, g)."""
    H = len(h)

    def pre(k):
        return (sum(x[r] * W_x[r][k] for r in range(len(x)))
                + sum(h[r] * W_h[r][k] for r in range(H)) + b[k])

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    h_new, c_new = [], []
    for j in range(H):
        i = sig(pre(j))
        f = sig(pre(H + j))
        o = sig(pre(2 * H + j))
        g = math.tanh(pre(3 * H + j))
        cj = f * c[j] + i * g
        c_new.append(cj)
        h_new.append(o * math.tanh(cj))
    return h_new, c_new


def numerical_grads(loss_fn, params, eps=1e-4):
    """Central differences over every coordinate of every array in ``params`` (in place)."""
    out = {}
    for name, arr in params.items():
        g = [0.0] * arr.size
        flat = arr.reshape(-1)
        for k in range(arr.size):
            old = flat[k]
            flat[k] = old + eps
            up = loss_fn()
            flat[k] = old - eps
            down = loss_fn()
            flat[k] = old
            g[k] = (up - down) / (2 * eps)
        out[name] = g
    return out


def max_relative_error(analytic, numeric, floor=1e-6):
    worst = 0.0
    for name, num in numeric.items():
        ana = analytic[name].reshape(-1)
        for a, n in zip(ana, num):
            worst = max(worst, abs(a - n) / max(abs(a) + abs(n), floor))
    return worst


def random_batch(rng, n, T, vocab_size, min_len=1):
    """Random index batch with prefix lengths in ``[min_len, T]``; ``rng`` is a numpy Generator."""
    from rxnjudge.neural.model import Batch
    import numpy as np

    len1 = rng.integers(min_len, T + 1, size=n)
    len2 = rng.integers(min_len, T + 1, size=n)
    cols = np.arange(T)[None, :]
    seq1 = np.where(cols < len1[:, None], rng.integers(2, vocab_size, size=(n, T)), 0)
    seq2 = np.where(cols < len2[:, None], rng.integers(2, vocab_size, size=(n, T)), 0)
    rsd_len = np.minimum(len1, len2)
    rsd = np.where(cols < rsd_len[:, None], rng.integers(2, vocab_size, size=(n, T)), 0)
    labels = rng.integers(0, 2, size=n)
    return Batch(seq1, seq2, rsd, len1, len2, labels)


def gradient_check(seed, d=3, H=4, T=6, vocab_size=9, n=3, use_rsd=True):
    """Worst elementwise relative error between backprop and central differences."""
    import numpy as np
    from rxnjudge.neural.model import ModelConfig, SiameseBiLSTM

    cfg = ModelConfig(vocab_size=vocab_size, embedding_dim=d, hidden_dim=H, max_len=T,
                      use_rsd=use_rsd, init_range=0.5, dtype="float64")
    model = SiameseBiLSTM(cfg, seed=seed)
    rng = np.random.default_rng(1000 + seed)
    for k, v in model.params.items():
        if k != "embedding":
            v += rng.normal(0, 0.1, size=v.shape)
    model.params["embedding"][0] = 0.0
    batch = random_batch(rng, n, T, vocab_size)
    _, cache = model.forward(batch)
    analytic = model.backward(cache, batch.labels)
    numeric = numerical_grads(lambda: model.loss(batch), model.params)
    # PAD row is frozen at zero by design; its analytic gradient is zeroed
    numeric["embedding"][:d] = [0.0] * d
    return max_relative_error(analytic, numeric)
