#include "fsiwave/quadrature.hpp"

#include <cmath>
#include <map>

#include "fsiwave/error.hpp"

namespace fsiwave {

namespace {

std::vector<QuadPoint> make_triangle_rule(int degree) {
    std::vector<QuadPoint> pts;
    auto orbit3 = [&](double a, double b, double w) {
        // all permutations of (a, b, b)
        pts.push_back({a, b, b, w});
        pts.push_back({b, a, b, w});
        pts.push_back({b, b, a, w});
    };
    if (degree <= 2) {
        orbit3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
    } else if (degree <= 4) {
        // Dunavant degree 4, 6 points
        orbit3(0.108103018168070, 0.445948490915965, 0.223381589678011);
        orbit3(0.816847572980459, 0.091576213509771, 0.109951743655322);
    } else if (degree <= 5) {
        // Dunavant degree 5, 7 points
        pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225});
        orbit3(0.059715871789770, 0.470142064105115, 0.132394152788506);
        orbit3(0.797426985353087, 0.101286507323456, 0.125939180544827);
    } else {
        throw InvalidArgument("triangle_rule: no rule for degree > 5");
    }
    return pts;
}

std::vector<QuadPoint> make_segment_rule(int n) {
    // Gauss-Legendre nodes/weights on [-1,1], mapped to [0,1].
    std::vector<double> x, w;
    switch (n) {
        case 1:
            x = {0.0};
            w = {2.0};
            break;
        case 2:
            x = {-0.5773502691896257, 0.5773502691896257};
            w = {1.0, 1.0};
            break;
        case 3:
            x = {-0.7745966692414834, 0.0, 0.7745966692414834};
            w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            break;
        case 4:
            x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                 0.8611363115940526};
            w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                 0.3478548451374538};
            break;
        case 5:
            x = {-0.9061798459386640, -0.5384693101056831, 0.0,
                 0.5384693101056831, 0.9061798459386640};
            w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                 0.4786286704993665, 0.2369268850561891};
            break;
        default:
            throw InvalidArgument("segment_rule: npoints must be in 1..5");
    }
    std::vector<QuadPoint> pts;
    for (int i = 0; i < n; ++i) {
        double t = 0.5 * (x[i] + 1.0);
        pts.push_back({1.0 - t, t, 0.0, 0.5 * w[i]});
    }
    return pts;
}

}  // namespace

const std::vector<QuadPoint>& triangle_rule(int degree) {
    static const std::map<int, std::vector<QuadPoint>> rules = {
        {2, make_triangle_rule(2)}, {4, make_triangle_rule(4)},
        {5, make_triangle_rule(5)}};
    if (degree <= 2) return rules.at(2);
    if (degree <= 4) return rules.at(4);
    if (degree <= 5) return rules.at(5);
    throw InvalidArgument("triangle_rule: no rule for degree > 5");
}

const std::vector<QuadPoint>& segment_rule(int npoints) {
    static const std::map<int, std::vector<QuadPoint>> rules = {
        {1, make_segment_rule(1)}, {2, make_segment_rule(2)},
        {3, make_segment_rule(3)}, {4, make_segment_rule(4)},
        {5, make_segment_rule(5)}};
    auto it = rules.find(npoints);
    if (it == rules.end())
        throw InvalidArgument("segment_rule: npoints must be in 1..5");
    return it->second;
}

}  // namespace fsiwave
