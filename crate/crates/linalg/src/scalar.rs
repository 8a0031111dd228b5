//! Real scalar abstraction and the LAPACK entry points it dispatches to.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use lapack_sys as lp;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub type C<T> = Complex<T>;

/// Floating point types the engine runs on.
///
/// The LAPACK hooks take column-major storage and return the LAPACK `info` code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Machine epsilon as a plain constant.
    const EPS: Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap()
    }

    /// Hermitian eigensolver (divide and conquer), lower triangle referenced.
    /// `vectors` overwrites `a` with the eigenvectors.
    fn heevd(vectors: bool, n: usize, a: &mut [C<Self>], w: &mut [Self]) -> i32;

    /// Hermitian band eigenvalues. `ab` is lower band storage with leading dimension kd+1.
    fn hbev(n: usize, kd: usize, ab: &mut [C<Self>], w: &mut [Self]) -> i32;

    /// Singular value decomposition, `a` is m×n and destroyed.
    /// With `vectors`, u is m×m and vt is n×n.
    fn gesdd(
        vectors: bool,
        m: usize,
        n: usize,
        a: &mut [C<Self>],
        s: &mut [Self],
        u: &mut [C<Self>],
        vt: &mut [C<Self>],
    ) -> i32;

    /// Real symmetric tridiagonal eigenproblem, vectors into z (n×n) when requested.
    fn stev(vectors: bool, n: usize, d: &mut [Self], e: &mut [Self], z: &mut [Self]) -> i32;
}

fn query_len<T: ToPrimitive>(x: T) -> usize {
    x.to_f64().unwrap().max(1.0) as usize
}

macro_rules! impl_real {
    ($f:ty, $heevd:ident, $hbev:ident, $gesdd:ident, $stev:ident) => {
        impl Real for $f {
            const EPS: Self = <$f>::EPSILON;

            fn heevd(vectors: bool, n: usize, a: &mut [C<Self>], w: &mut [Self]) -> i32 {
                if n == 0 {
                    return 0;
                }
                let jobz = if vectors { b'V' } else { b'N' } as std::os::raw::c_char;
                let uplo = b'L' as std::os::raw::c_char;
                let ni = n as i32;
                let mut info = 0;
                let mut wq = [C::<Self>::new(0.0, 0.0)];
                let mut rq = [0.0 as Self];
                let mut iq = [0i32];
                let q = -1i32;
                unsafe {
                    lp::$heevd(
                        &jobz, &uplo, &ni, a.as_mut_ptr() as *mut _, &ni, w.as_mut_ptr(),
                        wq.as_mut_ptr() as *mut _, &q, rq.as_mut_ptr(), &q, iq.as_mut_ptr(), &q,
                        &mut info,
                    );
                }
                if info != 0 {
                    return info;
                }
                let lwork = query_len(wq[0].re);
                let lrwork = query_len(rq[0]);
                let liwork = iq[0].max(1) as usize;
                let mut work = vec![C::<Self>::new(0.0, 0.0); lwork];
                let mut rwork = vec![0.0 as Self; lrwork];
                let mut iwork = vec![0i32; liwork];
                let (lw, lr, li) = (lwork as i32, lrwork as i32, liwork as i32);
                unsafe {
                    lp::$heevd(
                        &jobz, &uplo, &ni, a.as_mut_ptr() as *mut _, &ni, w.as_mut_ptr(),
                        work.as_mut_ptr() as *mut _, &lw, rwork.as_mut_ptr(), &lr,
                        iwork.as_mut_ptr(), &li, &mut info,
                    );
                }
                info
            }

            fn hbev(n: usize, kd: usize, ab: &mut [C<Self>], w: &mut [Self]) -> i32 {
                if n == 0 {
                    return 0;
                }
                let jobz = b'N' as std::os::raw::c_char;
                let uplo = b'L' as std::os::raw::c_char;
                let (ni, kdi, ldab, ldz) = (n as i32, kd as i32, (kd + 1) as i32, 1i32);
                let mut z = [C::<Self>::new(0.0, 0.0)];
                let mut work = vec![C::<Self>::new(0.0, 0.0); n];
                let mut rwork = vec![0.0 as Self; (3 * n).max(1)];
                let mut info = 0;
                unsafe {
                    lp::$hbev(
                        &jobz, &uplo, &ni, &kdi, ab.as_mut_ptr() as *mut _, &ldab, w.as_mut_ptr(),
                        z.as_mut_ptr() as *mut _, &ldz, work.as_mut_ptr() as *mut _,
                        rwork.as_mut_ptr(), &mut info,
                    );
                }
                info
            }

            fn gesdd(
                vectors: bool,
                m: usize,
                n: usize,
                a: &mut [C<Self>],
                s: &mut [Self],
                u: &mut [C<Self>],
                vt: &mut [C<Self>],
            ) -> i32 {
                if m == 0 || n == 0 {
                    return 0;
                }
                let jobz = if vectors { b'A' } else { b'N' } as std::os::raw::c_char;
                let (mi, ni) = (m as i32, n as i32);
                let (ldu, ldvt) = if vectors { (mi, ni) } else { (1, 1) };
                let mut info = 0;
                let mn = m.min(n);
                let mx = m.max(n);
                let lrwork = if vectors {
                    (5 * mn * mn + 5 * mn).max(2 * mx * mn + 2 * mn * mn + mn)
                } else {
                    7 * mn
                };
                let mut rwork = vec![0.0 as Self; lrwork.max(1)];
                let mut iwork = vec![0i32; 8 * mn];
                let mut wq = [C::<Self>::new(0.0, 0.0)];
                let q = -1i32;
                unsafe {
                    lp::$gesdd(
                        &jobz, &mi, &ni, a.as_mut_ptr() as *mut _, &mi, s.as_mut_ptr(),
                        u.as_mut_ptr() as *mut _, &ldu, vt.as_mut_ptr() as *mut _, &ldvt,
                        wq.as_mut_ptr() as *mut _, &q, rwork.as_mut_ptr(), iwork.as_mut_ptr(),
                        &mut info,
                    );
                }
                if info != 0 {
                    return info;
                }
                let lwork = query_len(wq[0].re);
                let mut work = vec![C::<Self>::new(0.0, 0.0); lwork];
                let lw = lwork as i32;
                unsafe {
                    lp::$gesdd(
                        &jobz, &mi, &ni, a.as_mut_ptr() as *mut _, &mi, s.as_mut_ptr(),
                        u.as_mut_ptr() as *mut _, &ldu, vt.as_mut_ptr() as *mut _, &ldvt,
                        work.as_mut_ptr() as *mut _, &lw, rwork.as_mut_ptr(), iwork.as_mut_ptr(),
                        &mut info,
                    );
                }
                info
            }

            fn stev(vectors: bool, n: usize, d: &mut [Self], e: &mut [Self], z: &mut [Self]) -> i32 {
                if n == 0 {
                    return 0;
                }
                let jobz = if vectors { b'V' } else { b'N' } as std::os::raw::c_char;
                let ni = n as i32;
                let ldz = if vectors { ni } else { 1 };
                let mut work = vec![0.0 as Self; (2 * n).max(1)];
                let mut info = 0;
                let mut dummy = [0.0 as Self];
                let zp = if vectors { z.as_mut_ptr() } else { dummy.as_mut_ptr() };
                unsafe {
                    lp::$stev(&jobz, &ni, d.as_mut_ptr(), e.as_mut_ptr(), zp, &ldz, work.as_mut_ptr(), &mut info);
                }
                info
            }
        }
    };
}

impl_real!(f32, cheevd_, chbev_, cgesdd_, sstev_);
impl_real!(f64, zheevd_, zhbev_, zgesdd_, dstev_);

pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}
