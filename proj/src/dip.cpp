#include "paradoxlens/diagnostics.hpp"

#include "paradoxlens/errors.hpp"

#include <algorithm>
#include <vector>

namespace paradoxlens {

namespace {

// Greatest convex minorant of the staircase lower corners (x[i], i) on
// [lo, hi]: prev[j] is the preceding touch point of the minorant ending at j.
void convex_minorant_links(const double* x, std::size_t lo, std::size_t hi,
                           std::vector<std::size_t>& prev) {
    prev[lo] = lo;
    for (std::size_t j = lo + 1; j <= hi; ++j) {
        prev[j] = j - 1;
        while (true) {
            const std::size_t a = prev[j];
            if (a == lo) break;
            const std::size_t b = prev[a];
            // keep a while slope(b->a) < slope(a->j)
            if ((x[j] - x[a]) * static_cast<double>(a - b) <
                (x[a] - x[b]) * static_cast<double>(j - a)) {
                break;
            }
            prev[j] = b;
        }
    }
}

// Least concave majorant of the staircase upper corners (x[i], i + 1) on
// [lo, hi]: next[k] is the following touch point of the majorant from k.
void concave_majorant_links(const double* x, std::size_t lo, std::size_t hi,
                            std::vector<std::size_t>& next) {
    next[hi] = hi;
    for (std::size_t k = hi; k-- > lo;) {
        next[k] = k + 1;
        while (true) {
            const std::size_t a = next[k];
            if (a == hi) break;
            const std::size_t b = next[a];
            // keep a while slope(a->b) < slope(k->a)
            if ((x[a] - x[k]) * static_cast<double>(b - a) <
                (x[b] - x[a]) * static_cast<double>(a - k)) {
                break;
            }
            next[k] = b;
        }
    }
}

} // namespace

double dip_statistic(std::vector<double> values) {
    const std::size_t n = values.size();
    if (n == 0) {
        throw InsufficientDataError("dip_statistic needs at least one value");
    }
    std::sort(values.begin(), values.end());
    const double* x = values.data();
    if (x[n - 1] == x[0]) {
        return 0.0;   // point mass; a degenerate unimodal CDF fits exactly
    }

    // All height bookkeeping is in count units; the result is best / (2n).
    std::size_t lo = 0;
    std::size_t hi = n - 1;
    double best = 1.0;   // 1/(2n) is the attainable minimum for distinct data

    std::vector<std::size_t> prev(n), next(n), gcm(n), lcm(n);

    while (true) {
        convex_minorant_links(x, lo, hi, prev);
        concave_majorant_links(x, lo, hi, next);

        // touch lists: gcm descends hi -> lo, lcm ascends lo -> hi
        std::size_t l_gcm = 0;
        gcm[l_gcm++] = hi;
        while (gcm[l_gcm - 1] > lo) {
            gcm[l_gcm] = prev[gcm[l_gcm - 1]];
            ++l_gcm;
        }
        std::size_t l_lcm = 0;
        lcm[l_lcm++] = lo;
        while (lcm[l_lcm - 1] < hi) {
            lcm[l_lcm] = next[lcm[l_lcm - 1]];
            ++l_lcm;
        }

        // Largest vertical gap between the two curves, scanning their touch
        // points in x order; (ig, ih) bracket the maximizing modal interval.
        double d = 0.0;
        std::size_t ig = l_gcm - 1;   // gcm[ig] == lo
        std::size_t ih = l_lcm - 1;   // lcm[ih] == hi
        if (l_gcm > 2 || l_lcm > 2) {
            std::size_t ix = l_gcm - 2;
            std::size_t iv = 1;
            while (true) {
                const std::size_t gx = gcm[ix];
                const std::size_t lv = lcm[iv];
                if (gx > lv) {
                    // LCM touch inside a GCM segment (gcm[ix+1], gx]
                    const std::size_t left = gcm[ix + 1];
                    const double denom = x[gx] - x[left];
                    const double line = denom > 0.0
                                            ? (x[lv] - x[left]) *
                                                  static_cast<double>(gx - left) / denom
                                            : static_cast<double>(gx - left);
                    const double gap = static_cast<double>(lv - left) + 1.0 - line;
                    if (gap >= d) {
                        d = gap;
                        ig = ix + 1;
                        ih = iv;
                    }
                    if (iv < l_lcm - 1) ++iv;
                } else {
                    // GCM touch inside an LCM segment [lcm[iv-1], lv)
                    const std::size_t left = lcm[iv - 1];
                    const double denom = x[lv] - x[left];
                    const double line = denom > 0.0
                                            ? (x[gx] - x[left]) *
                                                  static_cast<double>(lv - left) / denom
                                            : 0.0;
                    const double gap = line - (static_cast<double>(gx) -
                                               static_cast<double>(left) - 1.0);
                    if (gap >= d) {
                        d = gap;
                        ig = ix;
                        ih = iv;
                    }
                    if (ix > 0) --ix;
                }
                if (gcm[ix] == lcm[iv]) break;
            }
        } else {
            d = 1.0;   // both curves are single segments, constant unit gap
        }

        if (d <= best) break;

        // Deviations of the staircase from the GCM over the left flank that
        // is about to be discarded, and from the LCM over the right flank.
        double dip_low = 1.0;
        for (std::size_t j = ig; j + 1 < l_gcm; ++j) {
            const std::size_t jb = gcm[j + 1];
            const std::size_t je = gcm[j];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double slope = static_cast<double>(je - jb) / (x[je] - x[jb]);
                for (std::size_t jj = jb; jj <= je; ++jj) {
                    const double t =
                        static_cast<double>(jj - jb) + 1.0 - (x[jj] - x[jb]) * slope;
                    if (t > dip_low) dip_low = t;
                }
            }
        }
        double dip_high = 1.0;
        for (std::size_t j = ih; j + 1 < l_lcm; ++j) {
            const std::size_t jb = lcm[j];
            const std::size_t je = lcm[j + 1];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double slope = static_cast<double>(je - jb) / (x[je] - x[jb]);
                for (std::size_t jj = jb; jj <= je; ++jj) {
                    const double t =
                        (x[jj] - x[jb]) * slope - (static_cast<double>(jj - jb) - 1.0);
                    if (t > dip_high) dip_high = t;
                }
            }
        }
        best = std::max({best, dip_low, dip_high});

        const std::size_t new_lo = gcm[ig];
        const std::size_t new_hi = lcm[ih];
        if ((new_lo == lo && new_hi == hi) || new_lo >= new_hi) break;
        lo = new_lo;
        hi = new_hi;
    }

    return best / (2.0 * static_cast<double>(n));
}

} // namespace paradoxlens
