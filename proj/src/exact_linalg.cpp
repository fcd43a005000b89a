#include "qmint/exact_linalg.hpp"

#include <algorithm>
#include <utility>

#include "qmint/errors.hpp"

namespace qmint {

Rat det4(const Mat4q& m) {
    Mat4q a = m;
    Rat det = 1;
    for (int col = 0; col < 4; ++col) {
        int pivot = -1;
        for (int r = col; r < 4; ++r) {
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0)
            return Rat(0);
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (int r = col + 1; r < 4; ++r) {
            if (a[r][col] == 0)
                continue;
            Rat f = a[r][col] / a[col][col];
            for (int cidx = col; cidx < 4; ++cidx)
                a[r][cidx] -= f * a[col][cidx];
        }
    }
    return det;
}

Mat4q inverse4(const Mat4q& m) {
    Mat4q a = m;
    Mat4q inv{};
    for (int i = 0; i < 4; ++i)
        inv[i][i] = 1;
    for (int col = 0; col < 4; ++col) {
        int pivot = -1;
        for (int r = col; r < 4; ++r) {
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0)
            throw invariant_error("inverse4: singular matrix");
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            std::swap(inv[pivot], inv[col]);
        }
        Rat p = a[col][col];
        for (int cidx = 0; cidx < 4; ++cidx) {
            a[col][cidx] /= p;
            inv[col][cidx] /= p;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col || a[r][col] == 0)
                continue;
            Rat f = a[r][col];
            for (int cidx = 0; cidx < 4; ++cidx) {
                a[r][cidx] -= f * a[col][cidx];
                inv[r][cidx] -= f * inv[col][cidx];
            }
        }
    }
    return inv;
}

Vec4q row_times(const Vec4q& v, const Mat4q& m) {
    Vec4q r{};
    for (int j = 0; j < 4; ++j) {
        Rat s = 0;
        for (int i = 0; i < 4; ++i)
            s += v[i] * m[i][j];
        r[j] = s;
    }
    return r;
}

Mat4q mat_mul(const Mat4q& x, const Mat4q& y) {
    Mat4q r{};
    for (int i = 0; i < 4; ++i)
        r[i] = row_times(x[i], y);
    return r;
}

std::vector<Vec4z> hnf_rows(std::vector<Vec4z> rows) {
    std::size_t r = 0;
    for (int col = 0; col < 4 && r < rows.size(); ++col) {
        // clear column `col` below row r by repeated division steps
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t j = r; j < rows.size(); ++j) {
                if (rows[j][col] == 0)
                    continue;
                if (best == rows.size() ||
                    cmp(abs(rows[j][col]), abs(rows[best][col])) < 0)
                    best = j;
            }
            if (best == rows.size())
                break; // column empty below r
            std::swap(rows[r], rows[best]);
            bool any = false;
            for (std::size_t j = r + 1; j < rows.size(); ++j) {
                if (rows[j][col] == 0)
                    continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), rows[j][col].get_mpz_t(), rows[r][col].get_mpz_t());
                for (int k = 0; k < 4; ++k)
                    rows[j][k] -= q * rows[r][k];
                if (rows[j][col] != 0)
                    any = true;
            }
            if (!any)
                break;
        }
        if (r < rows.size() && rows[r][col] != 0) {
            if (rows[r][col] < 0)
                for (int k = 0; k < 4; ++k)
                    rows[r][k] = -rows[r][k];
            // reduce entries above the pivot into [0, pivot)
            for (std::size_t j = 0; j < r; ++j) {
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), rows[j][col].get_mpz_t(), rows[r][col].get_mpz_t());
                if (q != 0)
                    for (int k = 0; k < 4; ++k)
                        rows[j][k] -= q * rows[r][k];
            }
            ++r;
        }
    }
    rows.resize(r);
    return rows;
}

} // namespace qmint
