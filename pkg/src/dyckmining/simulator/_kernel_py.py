"""Pure-Python estimation kernel.

Plays attack cycles at word level from a buffer of uniforms and accumulates
per-cycle statistics. It must stay draw-for-draw and operation-for-operation
identical to ``_kernel.pyx`` so both backends return bit-identical sums.

Per-cycle vector (event time: a carried-over uncle is counted in the cycle
where it gets referred)::

    0 l    blocks added to the official chain
    1 z    attacker blocks among them
    2 u    uncle references made by official blocks
    3 v    ... of which to an uncle from the previous cycle
    4 uh1  in-cycle references by honest nephews
    5 uh2  previous-cycle references by honest nephews
    6 ru   attacker uncle reward (coinbase units)
    7 rn   references by attacker nephews
    8 r    attacker revenue z + ru + pi * rn
"""

N_STATS = 9
HIST_BINS = 64

SM, EFSM, LSM, ETH = 1, 2, 3, 4
NO_PENDING = -1
OWNER_HONEST, OWNER_ATTACKER = 0, 1


def _cycle_sm(u, i, n, q, gamma, out):
    """Selfish-mining cycle from u[i:]; returns the next index or -1 if u runs out.

    out receives [l, z, first_honest, k, after, in_ref_kind] where in_ref_kind is
    0 none, 1 SHS, 2 SHH won by the attacker's branch, 3 SHH won by the honest one,
    4 late S^k..S.. (attacker nephew at distance k), 5 S^k H^(k-1) (carryover).
    """
    if i >= n:
        return -1
    if u[i] >= q:
        out[0] = 1; out[1] = 0; out[2] = 1; out[5] = 0
        return i + 1
    i += 1
    if i >= n:
        return -1
    if u[i] >= q:  # SH: tie
        i += 1
        if i >= n:
            return -1
        if u[i] < q:
            out[0] = 2; out[1] = 2; out[2] = 0; out[5] = 1
            return i + 1
        i += 1
        if i >= n:
            return -1
        if u[i] < gamma:
            out[0] = 2; out[1] = 1; out[2] = 0; out[5] = 2
        else:
            out[0] = 2; out[1] = 0; out[2] = 1; out[5] = 3
        return i + 1
    i += 1
    k = 2
    lead = 2
    ns = 2
    seen_h = 0
    after = 0
    while True:
        if i >= n:
            return -1
        if u[i] < q:
            lead += 1
            ns += 1
            if seen_h:
                after = 1
            else:
                k += 1
        else:
            seen_h = 1
            if lead == 2:
                i += 1
                break
            lead -= 1
        i += 1
    out[0] = ns; out[1] = ns; out[2] = 0; out[3] = k; out[4] = after
    out[5] = 4 if after else 5
    return i


def _cycle_stubborn(u, i, n, q, gamma, lead_stubborn, out):
    """EFSM / LSM cycle; out receives [l, z]."""
    if i >= n:
        return -1
    lead = 0
    nh = 0
    zlast = 0
    if lead_stubborn:
        if u[i] >= q:
            out[0] = 1; out[1] = 0
            return i + 1
        lead = 1
        i += 1
    while True:
        if i >= n:
            return -1
        if u[i] < q:
            lead += 1
            i += 1
            continue
        i += 1
        nh += 1
        if nh >= 2:
            if i >= n:
                return -1
            if u[i] < gamma:
                zlast = nh - 1
            i += 1
        lead -= 1
        if lead_stubborn and lead == 0:
            break
        if lead < 0:
            out[0] = nh; out[1] = zlast
            return i
    # LSM final competition between equal-height forks
    if i >= n:
        return -1
    if u[i] < q:
        out[0] = nh + 1; out[1] = nh + 1
        return i + 1
    i += 1
    if i >= n:
        return -1
    out[0] = nh + 1
    out[1] = nh if u[i] < gamma else zlast
    return i + 1


def run_cycles(strategy, q, gamma, n1, ku, pi, u, pos, max_cycles,
               pending_age, pending_owner, sums, cross, hist):
    """Play up to ``max_cycles`` complete cycles from ``u[pos:]``.

    A cycle that would run past the end of ``u`` is not started over partially:
    the call returns at that cycle's first draw so the caller can extend the
    buffer. Returns ``(pos, cycles_done, pending_age, pending_owner)``.
    """
    u = u.tolist()
    ku = ku.tolist()
    n = len(u)
    out = [0, 0, 0, 0, 0, 0]
    x = [0.0] * N_STATS
    acc = sums.tolist()
    acc2 = cross.tolist()
    counts = hist.tolist()
    done = 0
    while done < max_cycles:
        if strategy == SM or strategy == ETH:
            j = _cycle_sm(u, pos, n, q, gamma, out)
        else:
            j = _cycle_stubborn(u, pos, n, q, gamma, strategy == LSM, out)
        if j < 0:
            break
        pos = j
        l = out[0]
        z = out[1]
        uu = 0.0; v = 0.0; uh1 = 0.0; uh2 = 0.0; ru = 0.0; rn = 0.0
        if strategy == ETH:
            first_honest = out[2]
            if pending_age != NO_PENDING:
                d = pending_age + 1
                if d <= n1:
                    uu += 1.0
                    v += 1.0
                    if first_honest:
                        uh2 += 1.0
                    else:
                        rn += 1.0
                    if pending_owner == OWNER_ATTACKER:
                        ru += ku[d]
            pending_age = NO_PENDING
            kind = out[5]
            if kind == 1:
                uu += 1.0; rn += 1.0
            elif kind == 2:
                uu += 1.0; uh1 += 1.0
            elif kind == 3:
                uu += 1.0; uh1 += 1.0; ru += ku[1]
            elif kind == 4:
                if out[3] <= n1:
                    uu += 1.0; rn += 1.0
            elif kind == 5:
                if out[3] <= n1:
                    pending_age = out[3] - 1
                    pending_owner = OWNER_HONEST
        x[0] = float(l); x[1] = float(z); x[2] = uu; x[3] = v; x[4] = uh1; x[5] = uh2
        x[6] = ru; x[7] = rn; x[8] = x[1] + ru + pi * rn
        for a in range(N_STATS):
            xa = x[a]
            acc[a] += xa
            row = acc2[a]
            for b in range(a, N_STATS):
                row[b] += xa * x[b]
        counts[l if l < HIST_BINS else HIST_BINS - 1] += 1
        done += 1
    sums[:] = acc
    cross[:, :] = acc2
    hist[:] = counts
    return pos, done, pending_age, pending_owner
