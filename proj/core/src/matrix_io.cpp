#include "perma/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "perma/errors.hpp"
#include "perma/report.hpp"

namespace perma {

namespace {

SquareMatrix parse_json_matrix(const std::string& content) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("matrix")) {
        throw ParseError("matrix JSON: expected object with fields \"n\" and \"matrix\"");
    }
    int n = 0;
    try {
        n = doc["n"].get<int>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError("matrix JSON: \"n\" is not an integer");
    }
    if (n < 1) throw ParseError("matrix JSON: dimension must be >= 1");
    const auto& rows = doc["matrix"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        throw ParseError("matrix JSON: \"matrix\" must hold exactly n rows");
    }
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            throw ParseError("matrix JSON: each row must hold exactly n numbers");
        }
        for (const auto& v : row) {
            if (!v.is_number()) throw ParseError("matrix JSON: non-numeric entry");
            entries.push_back(v.get<double>());
        }
    }
    try {
        return SquareMatrix(n, std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
}

SquareMatrix parse_text_matrix(const std::string& content) {
    std::istringstream in(content);
    int n = 0;
    if (!(in >> n) || n < 1) throw ParseError("matrix text: first token must be the dimension");
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    double v;
    while (in >> v) entries.push_back(v);
    if (entries.size() != static_cast<std::size_t>(n) * n) {
        throw ParseError("matrix text: expected " + std::to_string(n * n) + " entries, got " +
                         std::to_string(entries.size()));
    }
    try {
        return SquareMatrix(n, std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("matrix text: ") + e.what());
    }
}

}  // namespace

SquareMatrix parse_matrix(const std::string& content) {
    for (char c : content) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        if (c == '{') return parse_json_matrix(content);
        return parse_text_matrix(content);
    }
    throw ParseError("matrix input is empty");
}

SquareMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix(buf.str());
}

std::string matrix_to_json(const SquareMatrix& M) {
    const int n = M.dim();
    std::string out = "{\"n\":" + std::to_string(n) + ",\"matrix\":[";
    for (int i = 0; i < n; ++i) {
        out += (i ? ",[" : "[");
        for (int j = 0; j < n; ++j) {
            if (j) out += ",";
            out += fmt17(M(i, j));
        }
        out += "]";
    }
    out += "]}";
    return out;
}

}  // namespace perma
