#include "wbn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace wbn::kernels {

#if defined(WBN_HAVE_AVX2)
const KernelTable* avx2_table();
#endif

namespace {

bool cpu_has_avx2()
{
#if defined(WBN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* lookup(std::string_view name)
{
    for (const KernelTable* table : available()) {
        if (name == table->name) {
            return table;
        }
    }
    return nullptr;
}

const KernelTable* initial_choice()
{
    if (const char* env = std::getenv("WBN_SIMD")) {
        if (const KernelTable* table = lookup(env)) {
            return table;
        }
    }
    return available().back();
}

std::atomic<const KernelTable*>& current()
{
    static std::atomic<const KernelTable*> table{initial_choice()};
    return table;
}

} // namespace

const KernelTable* avx2()
{
#if defined(WBN_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

std::vector<const KernelTable*> available()
{
    std::vector<const KernelTable*> tables{&scalar()};
    if (const KernelTable* table = avx2()) {
        tables.push_back(table);
    }
    return tables;
}

const KernelTable& active()
{
    return *current().load(std::memory_order_acquire);
}

bool select(std::string_view name)
{
    const KernelTable* table = lookup(name);
    if (table == nullptr) {
        return false;
    }
    current().store(table, std::memory_order_release);
    return true;
}

} // namespace wbn::kernels
