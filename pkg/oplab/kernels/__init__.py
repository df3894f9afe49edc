from oplab.kernels.npfunc import Function, Constant, Identity, Absolute, Relu, Sine, \
    Square, WindowedRamp, PiecewiseLinear, Scaled, Sum, Dilated, random_piecewise_linear, \
    nondecreasing_shift, divided_difference, sampled_slope, check_lipschitz, smooth_step, \
    function_catalog, COINCIDENCE_TOL
from oplab.kernels.mollify import Mollifier, Mollified, mollify, mollified_derivative
from oplab.kernels.fourier import SmoothCutoff, FourierWeight, build_cutoff, fourier_weight, \
    reconstruct_ratio, reconstruction_errors, ratio_grid, moment
from oplab.kernels.profiles import IntegerProfile, random_integer_profile, power_sequence, \
    sequence_values, dyadic_variation
