#pragma once

#include "circtrace/discrete_op.hpp"

#include <json.hpp>
#include <stdexcept>
#include <string>

namespace ct {

// Malformed document; `path` locates the offending field (e.g. "terms[2].plus.K").
class InputError : public std::runtime_error {
public:
    InputError(const std::string& path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

using Json = nlohmann::json;

Json cplx_to_json(cplx v);
cplx cplx_from_json(const Json& j, const std::string& path);

// reject keys outside `allowed`
void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path);

Json to_json(const PhgSymbol& s);
Json to_json(const DiscreteOp& A);
// {order, depth, terms, patch, dim?}; a document without "patch" is a pure symbol operator
PhgSymbol symbol_from_json(const Json& j, const std::string& path = "");
DiscreteOp op_from_json(const Json& j, const std::string& path = "");

}  // namespace ct
