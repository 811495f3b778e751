#include "qhecke/quat.hpp"

#include <sstream>

namespace qhecke {

AlgebraParams build_algebra(i64 p) {
    if (!is_prime(p)) throw UsageError("p = " + std::to_string(p) + " is not prime");
    AlgebraParams A;
    A.p = p;
    if (p == 2 || p % 4 == 3) {
        A.eps = 1;
    } else if (p % 8 == 5) {
        A.eps = 2;
    } else {
        const i64 limit = 1000000;
        i64 r = 3;
        for (; r < limit; r += 4)
            if (is_prime(r) && legendre(r % p, p) == -1) break;
        if (r >= limit) throw Error("build_algebra: no r below search limit");
        i64 a = 0;
        for (; a < r; ++a)
            if ((mulmod(mulmod(a, a, r), p, r) + 1) % r == 0) break;
        if (a == r) throw Error("build_algebra: no a with r | a^2 p + 1");
        A.eps = r;
        A.r = r;
        A.a = a;
    }
    return A;
}

Quat Quat::operator+(const Quat& o) const { return Quat(c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]); }
Quat Quat::operator-(const Quat& o) const { return Quat(c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]); }
Quat Quat::operator-() const { return Quat(-c[0], -c[1], -c[2], -c[3]); }
Quat Quat::operator*(const mpq_class& s) const { return Quat(c[0] * s, c[1] * s, c[2] * s, c[3] * s); }
Quat Quat::operator/(const mpq_class& s) const { return Quat(c[0] / s, c[1] / s, c[2] / s, c[3] / s); }

Quat mul(const AlgebraParams& A, const Quat& x, const Quat& y) {
    const mpq_class e(A.eps), p(A.p);
    const auto& a = x.c;
    const auto& b = y.c;
    Quat z;
    z.c[0] = a[0] * b[0] - e * a[1] * b[1] - p * a[2] * b[2] - e * p * a[3] * b[3];
    z.c[1] = a[0] * b[1] + a[1] * b[0] + p * (a[2] * b[3] - a[3] * b[2]);
    z.c[2] = a[0] * b[2] + a[2] * b[0] - e * (a[1] * b[3] - a[3] * b[1]);
    z.c[3] = a[0] * b[3] + a[3] * b[0] + a[1] * b[2] - a[2] * b[1];
    return z;
}

Quat conj(const Quat& x) { return Quat(x.c[0], -x.c[1], -x.c[2], -x.c[3]); }

mpq_class trd(const Quat& x) { return 2 * x.c[0]; }

mpq_class nrd(const AlgebraParams& A, const Quat& x) {
    const mpq_class e(A.eps), p(A.p);
    return x.c[0] * x.c[0] + e * x.c[1] * x.c[1] + p * x.c[2] * x.c[2] + e * p * x.c[3] * x.c[3];
}

Quat inverse(const AlgebraParams& A, const Quat& x) {
    mpq_class n = nrd(A, x);
    if (n == 0) throw Error("inverse of zero quaternion");
    return conj(x) / n;
}

std::string to_string(const Quat& x) {
    static const char* names[4] = {"", "i", "j", "ij"};
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k < 4; ++k) {
        if (x.c[k] == 0) continue;
        mpq_class v = x.c[k];
        if (!first) os << (v < 0 ? " - " : " + ");
        else if (v < 0) os << "-";
        if (v < 0) v = -v;
        if (k == 0) os << v.get_str();
        else if (v == 1) os << names[k];
        else os << v.get_str() << "*" << names[k];
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

mpq_class det4(Mat4Q m) {
    mpq_class d = 1;
    for (int c = 0; c < 4; ++c) {
        int piv = -1;
        for (int r = c; r < 4; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            d = -d;
        }
        d *= m[c][c];
        for (int r = c + 1; r < 4; ++r) {
            if (m[r][c] == 0) continue;
            mpq_class f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return d;
}

Mat4Q inverse4(const Mat4Q& m0) {
    Mat4Q m = m0, inv{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) inv[r][c] = (r == c) ? 1 : 0;
    for (int c = 0; c < 4; ++c) {
        int piv = -1;
        for (int r = c; r < 4; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw Error("singular 4x4 matrix");
        std::swap(m[piv], m[c]);
        std::swap(inv[piv], inv[c]);
        mpq_class f = m[c][c];
        for (int k = 0; k < 4; ++k) {
            m[c][k] /= f;
            inv[c][k] /= f;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == c || m[r][c] == 0) continue;
            mpq_class g = m[r][c];
            for (int k = 0; k < 4; ++k) {
                m[r][k] -= g * m[c][k];
                inv[r][k] -= g * inv[c][k];
            }
        }
    }
    return inv;
}

Quat Order::element(const Vec4& v) const {
    Quat x;
    for (int a = 0; a < 4; ++a) x = x + s[a] * mpq_class(v[a]);
    return x;
}

Quat Order::element(const QVec4& v) const {
    Quat x;
    for (int a = 0; a < 4; ++a) x = x + s[a] * v[a];
    return x;
}

QVec4 Order::coords(const Quat& x) const {
    QVec4 out{0, 0, 0, 0};
    for (int k = 0; k < 4; ++k)
        for (int a = 0; a < 4; ++a) out[k] += x.c[a] * from_std[a][k];
    return out;
}

bool Order::integral_coords(const Quat& x, Vec4& out) const {
    QVec4 q = coords(x);
    for (int k = 0; k < 4; ++k) {
        if (q[k].get_den() != 1) return false;
        out[k] = q[k].get_num();
    }
    return true;
}

Vec4 Order::mul(const Vec4& x, const Vec4& y) const {
    Vec4 z{0, 0, 0, 0};
    for (int a = 0; a < 4; ++a) {
        if (x[a] == 0) continue;
        for (int b = 0; b < 4; ++b) {
            if (y[b] == 0) continue;
            mpz_class xy = x[a] * y[b];
            for (int k = 0; k < 4; ++k)
                if (mt[a][b][k]) z[k] += xy * mt[a][b][k];
        }
    }
    return z;
}

Vec4 Order::conj(const Vec4& x) const {
    Vec4 z{0, 0, 0, 0};
    for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 4; ++k)
            if (cj[a][k]) z[k] += x[a] * cj[a][k];
    return z;
}

mpz_class Order::nrd(const Vec4& x) const {
    mpz_class t = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) t += x[a] * x[b] * tr[a][b];
    return t / 2;
}

mpz_class Order::trd(const Vec4& x) const {
    mpz_class t = 0;
    for (int a = 0; a < 4; ++a) t += x[a] * mpz_class(qhecke::trd(s[a]));
    return t;
}

static i64 to_i64(const mpq_class& q, const char* what) {
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) throw Error(std::string("order validation: ") + what);
    return q.get_num().get_si();
}

Order make_order(const AlgebraParams& A, const std::array<Quat, 4>& s) {
    Order O;
    O.params = A;
    O.s = s;
    Mat4Q std_rows;
    for (int a = 0; a < 4; ++a) std_rows[a] = s[a].c;
    if (det4(std_rows) == 0) throw Error("order validation: basis is not of rank 4");
    O.from_std = inverse4(std_rows);
    if (!O.integral_coords(Quat::scalar(1), O.one)) throw Error("order validation: 1 is not in the Z-span");
    for (int a = 0; a < 4; ++a) {
        if (trd(s[a]).get_den() != 1) throw Error("order validation: non-integral trace of s" + std::to_string(a + 1));
        if (nrd(A, s[a]).get_den() != 1)
            throw Error("order validation: nrd(" + to_string(s[a]) + ") = " + nrd(A, s[a]).get_str() + " is not integral");
        for (int b = 0; b < 4; ++b) {
            QVec4 prod = O.coords(mul(A, s[a], s[b]));
            for (int k = 0; k < 4; ++k) O.mt[a][b][k] = to_i64(prod[k], "basis not closed under multiplication");
            O.tr[a][b] = to_i64(trd(mul(A, s[a], conj(s[b]))), "non-integral trace form");
        }
        QVec4 cc = O.coords(conj(s[a]));
        for (int k = 0; k < 4; ++k) O.cj[a][k] = to_i64(cc[k], "not closed under conjugation");
    }
    return O;
}

std::array<Quat, 4> literal_order_basis(const AlgebraParams& A) {
    const i64 p = A.p;
    const mpq_class h(1, 2), q(1, 4);
    if (p == 2) return {Quat(h, h, h, h), Quat(0, 1, 0, 0), Quat(0, 0, 1, 0), Quat(0, 0, 0, 1)};
    if (p % 4 == 3) return {Quat(1, 0, 0, 0), Quat(0, 1, 0, 0), Quat(0, h, 0, h), Quat(h, 0, h, 0)};
    if (p % 8 == 5) return {Quat(h, 0, h, h), Quat(0, q, h, q), Quat(0, 0, 1, 0), Quat(0, 0, 0, 1)};
    mpq_class ir(1, *A.r), air(*A.a, *A.r);
    return {Quat(h, 0, h, 0), Quat(0, h, 0, h), Quat(0, 0, ir, air), Quat(0, 0, 0, 1)};
}

static std::array<Quat, 4> corrected_order_basis(const AlgebraParams& A) {
    const mpq_class h(1, 2);
    if (A.p == 2) return {Quat(h, h, h, 0), Quat(0, 1, 0, 0), Quat(0, 0, h, h), Quat(0, 0, 0, 1)};
    if (A.r) {
        mpq_class ir(1, *A.r), air(*A.a, *A.r);
        return {Quat(h, h, 0, 0), Quat(0, 0, h, h), Quat(0, ir, 0, air), Quat(0, 0, 0, 1)};
    }
    return literal_order_basis(A);
}

static bool try_maximal(const AlgebraParams& A, const std::array<Quat, 4>& s, Order& out, std::string& why) {
    try {
        out = make_order(A, s);
        mpz_class d = reduced_discriminant(A, s);
        if (d != A.p) {
            why = "reduced discriminant " + d.get_str() + " != p";
            return false;
        }
        return true;
    } catch (const Error& e) {
        why = e.what();
        return false;
    }
}

Order maximal_order_basis(const AlgebraParams& A) {
    Order O;
    std::string why;
    if (try_maximal(A, literal_order_basis(A), O, why)) return O;
    std::string why2;
    if (!try_maximal(A, corrected_order_basis(A), O, why2))
        throw Error("maximal_order_basis(p=" + std::to_string(A.p) + "): literal basis failed (" + why +
                    "); corrected basis failed (" + why2 + ")");
    std::string note = "literal basis rejected (" + why + "); using {";
    for (int a = 0; a < 4; ++a) note += (a ? ", " : "") + to_string(O.s[a]);
    O.notes.push_back(note + "}");
    return O;
}

mpz_class reduced_discriminant(const AlgebraParams& A, const std::array<Quat, 4>& s) {
    Mat4Q g;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) g[a][b] = trd(mul(A, s[a], conj(s[b])));
    mpq_class d = abs(det4(g)), r;
    if (d == 0 || !rational_sqrt(d, r) || r.get_den() != 1)
        throw Error("reduced_discriminant: |det| = " + d.get_str() + " is not a perfect square");
    return r.get_num();
}

}  // namespace qhecke
