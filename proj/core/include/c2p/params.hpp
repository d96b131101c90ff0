#pragma once

#include <string>
#include <utility>
#include <vector>

#include "c2p/rng.hpp"
#include "c2p/tensor.hpp"

namespace c2p {

// Ordered name -> tensor map. Registration order is the iteration order,
// which fixes both initialization draws and optimizer update order.
class ParamSet {
public:
    ag::Tensor& add(const std::string& name, ag::Tensor t) {
        if (find(name))
            throw ConfigError("duplicate parameter name: " + name);
        items_.emplace_back(name, std::move(t));
        return items_.back().second;
    }

    bool contains(const std::string& name) const { return find(name) != nullptr; }

    ag::Tensor& at(const std::string& name) {
        if (auto* t = const_cast<ag::Tensor*>(find(name))) return *t;
        throw ConfigError("unknown parameter: " + name);
    }
    const ag::Tensor& at(const std::string& name) const {
        if (const auto* t = find(name)) return *t;
        throw ConfigError("unknown parameter: " + name);
    }

    void zero_grad() {
        for (auto& [name, t] : items_) t.zero_grad();
    }

    std::size_t size() const { return items_.size(); }
    auto begin() { return items_.begin(); }
    auto end() { return items_.end(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    // Merges another set under a name prefix (used to assemble the full
    // trainable state for checkpoints).
    void adopt(const ParamSet& other, const std::string& prefix) {
        for (const auto& [name, t] : other) add(prefix + name, t);
    }

private:
    const ag::Tensor* find(const std::string& name) const {
        for (const auto& [n, t] : items_)
            if (n == name) return &t;
        return nullptr;
    }

    std::vector<std::pair<std::string, ag::Tensor>> items_;
};

// Uniform init in +-1/sqrt(fan_in), drawn in row-major element order.
ag::Tensor init_uniform(ag::Shape shape, std::size_t fan_in, Pcg32& rng);

}  // namespace c2p
