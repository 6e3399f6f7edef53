use alloc::vec::Vec;

/// Suffix array by induced sorting. Symbols are arbitrary `u32`s; shorter
/// suffixes sort before their extensions.
pub fn build_suffix_array(s: &[u32]) -> Vec<usize> {
    let upper = s.iter().copied().max().unwrap_or(0) as usize;
    let s: Vec<usize> = s.iter().map(|&c| c as usize).collect();
    sa_is(&s, upper)
}

fn sa_naive(s: &[usize]) -> Vec<usize> {
    let mut sa: Vec<usize> = (0..s.len()).collect();
    sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
    sa
}

const NAIVE_BELOW: usize = 40;
const EMPTY: usize = usize::MAX;

/// Induced sorting over symbols in `0..=upper`.
fn sa_is(s: &[usize], upper: usize) -> Vec<usize> {
    let n = s.len();
    match n {
        0 => return Vec::new(),
        1 => return alloc::vec![0],
        2 => return if s[0] < s[1] { alloc::vec![0, 1] } else { alloc::vec![1, 0] },
        _ if n < NAIVE_BELOW => return sa_naive(s),
        _ => {}
    }

    // true for S-type positions
    let mut ls = alloc::vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] { ls[i + 1] } else { s[i] < s[i + 1] };
    }
    let mut sum_l = alloc::vec![0usize; upper + 1];
    let mut sum_s = alloc::vec![0usize; upper + 1];
    for i in 0..n {
        if !ls[i] {
            sum_s[s[i]] += 1;
        } else {
            sum_l[s[i] + 1] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let mut sa = alloc::vec![EMPTY; n];
    let mut buf = alloc::vec![0usize; upper + 1];
    let mut induce = |sa: &mut [usize], lms: &[usize]| {
        sa.fill(EMPTY);
        buf.copy_from_slice(&sum_s);
        for &d in lms {
            if d == n {
                continue;
            }
            sa[buf[s[d]]] = d;
            buf[s[d]] += 1;
        }
        buf.copy_from_slice(&sum_l);
        sa[buf[s[n - 1]]] = n - 1;
        buf[s[n - 1]] += 1;
        for i in 0..n {
            let v = sa[i];
            if v != EMPTY && v >= 1 && !ls[v - 1] {
                sa[buf[s[v - 1]]] = v - 1;
                buf[s[v - 1]] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i];
            if v != EMPTY && v >= 1 && ls[v - 1] {
                buf[s[v - 1] + 1] -= 1;
                sa[buf[s[v - 1] + 1]] = v - 1;
            }
        }
    };

    let mut lms_map = alloc::vec![EMPTY; n + 1];
    let mut lms = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = lms.len();
            lms.push(i);
        }
    }
    let m = lms.len();

    induce(&mut sa, &lms);

    if m > 0 {
        let mut sorted_lms: Vec<usize> = sa.iter().copied().filter(|&v| lms_map[v] != EMPTY).collect();
        let mut rec_s = alloc::vec![0usize; m];
        let mut rec_upper = 0;
        rec_s[lms_map[sorted_lms[0]]] = 0;
        for i in 1..m {
            let (mut l, mut r) = (sorted_lms[i - 1], sorted_lms[i]);
            let end_l = if lms_map[l] + 1 < m { lms[lms_map[l] + 1] } else { n };
            let end_r = if lms_map[r] + 1 < m { lms[lms_map[r] + 1] } else { n };
            let mut same = true;
            if end_l - l != end_r - r {
                same = false;
            } else {
                while l < end_l && s[l] == s[r] {
                    l += 1;
                    r += 1;
                }
                if l == n || s[l] != s[r] {
                    same = false;
                }
            }
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i]]] = rec_upper;
        }
        let rec_sa = sa_is(&rec_s, rec_upper);
        for (slot, &r) in sorted_lms.iter_mut().zip(&rec_sa) {
            *slot = lms[r];
        }
        induce(&mut sa, &sorted_lms);
    }
    sa
}

/// `lcp[i]` is the longest common prefix of the suffixes at `sa[i]` and
/// `sa[i + 1]`; the result has `n - 1` entries (none for `n <= 1`).
pub fn lcp_array(s: &[u32], sa: &[usize]) -> Vec<usize> {
    let n = s.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut rank = alloc::vec![0usize; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p] = i;
    }
    let mut lcp = alloc::vec![0usize; n - 1];
    let mut h = 0usize;
    for i in 0..n {
        h = h.saturating_sub(1);
        if rank[i] == 0 {
            continue;
        }
        let j = sa[rank[i] - 1];
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[rank[i] - 1] = h;
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(s: &[u32]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..s.len()).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        sa
    }

    #[test]
    fn banana() {
        let s: Vec<u32> = b"banana".iter().map(|&b| b as u32).collect();
        assert_eq!(build_suffix_array(&s), [5, 3, 1, 0, 4, 2]);
        assert_eq!(lcp_array(&s, &[5, 3, 1, 0, 4, 2]), [1, 3, 0, 0, 2]);
    }

    #[test]
    fn tiny_inputs() {
        assert!(build_suffix_array(&[]).is_empty());
        assert_eq!(build_suffix_array(&[7]), [0]);
        assert_eq!(build_suffix_array(&[3, 3]), [1, 0]);
        let long_run = alloc::vec![5u32; 500];
        assert_eq!(build_suffix_array(&long_run), naive(&long_run));
    }

    proptest! {
        #[test]
        fn matches_naive_sort(alpha in 1u32..6, s in prop::collection::vec(0u32..1000, 0..400)) {
            let s: Vec<u32> = s.into_iter().map(|c| c % alpha).collect();
            let sa = build_suffix_array(&s);
            prop_assert_eq!(&sa, &naive(&s));
            let lcp = lcp_array(&s, &sa);
            for (i, &l) in lcp.iter().enumerate() {
                let (a, b) = (&s[sa[i]..], &s[sa[i + 1]..]);
                prop_assert_eq!(l, a.iter().zip(b).take_while(|(x, y)| x == y).count());
            }
        }
    }
}
