#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace roughness::detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

// In-place complex DFT of fixed size, FFTW backend. Plan creation is guarded
// by a global mutex (FFTW planning is not thread-safe); execution on caller
// buffers is. FFTW_UNALIGNED lifts alignment requirements on those buffers.
class ComplexFft {
public:
    explicit ComplexFft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("ComplexFft: zero size");
        std::vector<std::complex<double>> probe(n);
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(probe.data()),
                                 reinterpret_cast<fftw_complex*>(probe.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan_) throw std::runtime_error("ComplexFft: planner failed");
    }

    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    ~ComplexFft() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan_);
    }

    std::size_t size() const { return n_; }

    // Unnormalized transform with exponent +2*pi*i*jk/n, in place.
    void transform(std::complex<double>* data) const {
        fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

private:
    std::size_t n_;
    fftw_plan plan_;
};

}  // namespace roughness::detail
