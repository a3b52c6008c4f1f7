#include "taxsim/memory.hpp"

#include <stdexcept>

#include "taxsim/format.hpp"

namespace taxsim {

MemoryPool::MemoryPool(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("memory capacity must be positive");
}

void MemoryPool::push(MemoryEntry entry) {
    entries_.push_back(std::move(entry));
    while (entries_.size() > capacity_) entries_.pop_front();
}

std::string MemoryPool::summary() const {
    std::string out;
    for (const auto& e : entries_) {
        out += e.date + ": ";
        out += e.employed ? "worked" : "did not work";
        out += ", income $" + fixed(e.pretax_income, 2);
        out += ", tax $" + fixed(e.tax_paid, 2);
        out += ", consumption $" + fixed(e.consumption, 2);
        out += ", savings $" + fixed(e.savings, 2);
        out += ", price $" + fixed(e.price, 2);
        out += ", chose work " + fixed(e.decision.work, 2);
        out += " and consumption " + fixed(e.decision.consumption, 2) + ".\n";
    }
    return out;
}

}  // namespace taxsim
