/* Dot product with eight independent accumulators.
 *
 * The restrict qualifiers let the compiler pack the accumulator lanes into
 * SIMD registers; the summation order is fixed, so results are reproducible
 * run to run (they differ from a strict left-to-right sum in the last ulp).
 */

#include <stddef.h>

double playmask_dot(const double* restrict w, const double* restrict h, int n)
{
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    double tail = 0.0;
    size_t i = 0;
    const size_t len = (size_t)n;
    const size_t blocked = len - len % 8;
    for (; i < blocked; i += 8) {
        for (size_t k = 0; k < 8; k++)
            acc[k] += w[i + k] * h[i + k];
    }
    for (; i < len; i++)
        tail += w[i] * h[i];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3]))
         + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}
