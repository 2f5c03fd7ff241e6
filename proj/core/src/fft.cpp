#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace prida::detail {

namespace {

template <typename T>
struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)))), size(n)
    {
        if (!data)
            throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    T* data;
    std::size_t size;
};

// The FFTW planner is not reentrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

struct RealFft2d::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    Plans(int w, int h)
    {
        const std::size_t n = static_cast<std::size_t>(w) * h;
        const std::size_t nc = static_cast<std::size_t>(h) * (w / 2 + 1);
        FftwBuffer<double> real(n);
        FftwBuffer<fftw_complex> cplx(nc);
        r2c = fftw_plan_dft_r2c_2d(h, w, real.data, cplx.data, FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_2d(h, w, cplx.data, real.data, FFTW_ESTIMATE);
    }
    ~Plans()
    {
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }
};

RealFft2d::RealFft2d(int width, int height) : width_(width), height_(height)
{
    static std::map<std::pair<int, int>, std::unique_ptr<Plans>> cache;
    std::lock_guard lock(planner_mutex());
    auto& slot = cache[{width, height}];
    if (!slot)
        slot = std::make_unique<Plans>(width, height);
    plans_ = slot.get();
}

std::size_t RealFft2d::spectrum_size() const { return static_cast<std::size_t>(height_) * (width_ / 2 + 1); }

std::vector<std::complex<double>> RealFft2d::forward(const std::vector<double>& in) const
{
    FftwBuffer<double> real(in.size());
    FftwBuffer<fftw_complex> cplx(spectrum_size());
    std::memcpy(real.data, in.data(), sizeof(double) * in.size());
    fftw_execute_dft_r2c(plans_->r2c, real.data, cplx.data);
    std::vector<std::complex<double>> out(spectrum_size());
    std::memcpy(static_cast<void*>(out.data()), cplx.data, sizeof(fftw_complex) * out.size());
    return out;
}

std::vector<double> RealFft2d::inverse(const std::vector<std::complex<double>>& in) const
{
    FftwBuffer<fftw_complex> cplx(spectrum_size());
    FftwBuffer<double> real(static_cast<std::size_t>(width_) * height_);
    std::memcpy(cplx.data, static_cast<const void*>(in.data()), sizeof(fftw_complex) * spectrum_size());
    fftw_execute_dft_c2r(plans_->c2r, cplx.data, real.data);
    return std::vector<double>(real.data, real.data + real.size);
}

} // namespace prida::detail
