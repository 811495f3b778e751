#include "qhecke/hecke.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <mutex>

namespace py = pybind11;
using namespace qhecke;

namespace {

std::mutex cache_mu;
std::map<i64, ClassSet> cache;

const ClassSet& classes(i64 p) {
    if (!is_prime(p)) throw UsageError("p = " + std::to_string(p) + " is not prime");
    std::lock_guard lock(cache_mu);
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, left_ideal_classes(maximal_order_basis(build_algebra(p)))).first;
    return it->second;
}

py::object opt(const std::optional<i64>& v) { return v ? py::object(py::int_(*v)) : py::object(py::none()); }

py::tuple f2(const F2& x) { return py::make_tuple(x.s, x.t); }

py::list fmat(const FMat& M) {
    py::list rows;
    for (const auto& r : M) {
        py::list row;
        for (const F2& x : r) row.append(f2(x));
        rows.append(row);
    }
    return rows;
}

py::dict algebra(i64 p) {
    if (!is_prime(p)) throw UsageError("p = " + std::to_string(p) + " is not prime");
    const AlgebraParams A = build_algebra(p);
    py::dict d;
    d["p"] = A.p;
    d["eps"] = A.eps;
    d["r"] = opt(A.r);
    d["a"] = opt(A.a);
    py::list basis;
    for (const Quat& s : maximal_order_basis(A).s) {
        py::list c;
        for (const auto& x : s.c) c.append(to_string(x));
        basis.append(c);
    }
    d["order_basis"] = basis;
    return d;
}

py::dict class_set(i64 p) {
    const ClassSet& C = classes(p);
    py::dict d;
    d["p"] = p;
    d["h"] = C.h();
    d["mass"] = to_string(C.mass());
    d["unit_orders"] = C.unit_orders;
    py::list norms;
    for (const auto& n : C.norms) norms.append(py::int_(py::str(n.get_str())));
    d["norms"] = norms;
    return d;
}

py::dict hecke_level1(i64 p, i64 ell0) {
    const ClassSet& C = classes(p);
    LevelOneMatrix T;
    {
        py::gil_scoped_release release;
        T = hecke_matrix_level1(C, ell0);
    }
    py::dict d;
    d["ell0"] = ell0;
    d["counts"] = T.counts;
    d["mod_p"] = T.mod_p;
    return d;
}

py::list hecke_weight(i64 p, i64 N, i64 ell0, i64 k) {
    if (p == 2) throw UsageError("p = 2 supports only level 1, weight 0");
    const ClassSet& C = classes(p);
    FMat M;
    {
        py::gil_scoped_release release;
        M = hecke_matrix_general(C, N, ell0).weight_k(k);
    }
    return fmat(M);
}

py::list eigensystems(i64 p, const std::vector<i64>& ells) {
    const ClassSet& C = classes(p);
    std::vector<FMat> mats;
    for (i64 e : ells) mats.push_back(level1_as_fmat(hecke_matrix_level1(C, e)));
    const EigensystemResult r = simultaneous_eigensystems(Fp2Field(p, C.O.params.eps), mats);
    py::list out;
    for (const auto& s : r.systems) {
        py::dict e;
        py::dict vals;
        for (size_t t = 0; t < ells.size(); ++t) vals[py::int_(ells[t])] = f2(s.values[t]);
        e["values"] = vals;
        e["multiplicity"] = s.multiplicity;
        e["diagonalizable"] = s.diagonalizable;
        out.append(e);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_qhecke, m) {
    m.doc() = "Mod-p Hecke operators on definite quaternion algebras";
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    m.def("algebra", &algebra, py::arg("p"), "Algebra parameters and maximal order basis (coefficients of 1, i, j, ij).");
    m.def("class_set", &class_set, py::arg("p"), "Left ideal classes: h, mass, unit orders and reduced norms.");
    m.def("hecke_level1", &hecke_level1, py::arg("p"), py::arg("ell0"),
          "Level-1 weight-0 matrix; entry [j][i] is T(1_i)(j).");
    m.def("hecke_weight", &hecke_weight, py::arg("p"), py::arg("N"), py::arg("ell0"), py::arg("k"),
          "Weight-k block over F_{p^2}; entries are (s, t) pairs.");
    m.def("eigensystems", &eigensystems, py::arg("p"), py::arg("ells"),
          "Simultaneous level-1 eigensystems over F_{p^2}.");
}
