#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <type_traits>
#include <vector>

#include "xylokit/errors.hpp"

// Internal JSON <-> Eigen helpers. nlohmann's plain `json` keeps keys in
// sorted order and emits shortest round-trip numbers, which is what makes
// every serialized artifact canonical.

namespace xylokit::jsonu {

using nlohmann::json;

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename Derived>
json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

/// Pair of channel slices serialized innermost: out[r][c] = [slice0, slice1].
template <typename Mat>
json slices_to_json(const std::array<Mat, 2>& slices) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < slices[0].rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < slices[0].cols(); ++c)
            row.push_back(json::array({slices[0](r, c), slices[1](r, c)}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline const json& require(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError("missing field '" + key + "'");
    return j.at(key);
}

/// Integer tensors must hold integers; a stray 1.5 is a malformed file, not
/// a value to truncate.
template <typename Scalar>
bool is_scalar(const json& v) {
    if constexpr (std::is_integral_v<Scalar>)
        return v.is_number_integer();
    else
        return v.is_number();
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_from_json(
    const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    for (const auto& row : j) {
        if (!row.is_array()) throw ParseError(what + ": expected an array of rows");
        if (cols < 0)
            cols = static_cast<Eigen::Index>(row.size());
        else if (cols != static_cast<Eigen::Index>(row.size()))
            throw ParseError(what + ": ragged rows");
    }
    if (rows == 0) cols = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& cell = j[r][c];
            if (!is_scalar<Scalar>(cell)) throw ParseError(what + ": bad entry type");
            m(r, c) = cell.get<Scalar>();
        }
    return m;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector_from_json(const json& j,
                                                          const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!is_scalar<Scalar>(j[i])) throw ParseError(what + ": bad entry type");
        v(i) = j[i].get<Scalar>();
    }
    return v;
}

template <typename Scalar>
std::array<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>, 2> slices_from_json(
    const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    for (const auto& row : j) {
        if (!row.is_array()) throw ParseError(what + ": expected an array of rows");
        if (cols < 0)
            cols = static_cast<Eigen::Index>(row.size());
        else if (cols != static_cast<Eigen::Index>(row.size()))
            throw ParseError(what + ": ragged rows");
    }
    if (rows == 0) cols = 0;
    std::array<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>, 2> out;
    out[0].resize(rows, cols);
    out[1].resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& cell = j[r][c];
            if (!cell.is_array() || cell.size() != 2 || !is_scalar<Scalar>(cell[0]) ||
                !is_scalar<Scalar>(cell[1]))
                throw ParseError(what + ": each entry must be [channel0, channel1]");
            out[0](r, c) = cell[0].get<Scalar>();
            out[1](r, c) = cell[1].get<Scalar>();
        }
    return out;
}

/// Rejects artifacts of the wrong kind with a readable message instead of
/// a missing-field error.
inline void expect_format(const json& j, const std::string& expected) {
    if (j.is_object() && j.contains("format") && j.at("format").is_string()) {
        const std::string found = j.at("format").get<std::string>();
        if (found != expected)
            throw ParseError("expected a '" + expected + "' file, found '" + found + "'");
    }
}

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

template <typename T>
T get_number(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_number()) throw ParseError("field '" + key + "' must be a number");
    return v.get<T>();
}

inline int get_int(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) throw ParseError("field '" + key + "' must be an integer");
    return v.get<int>();
}

}  // namespace xylokit::jsonu
