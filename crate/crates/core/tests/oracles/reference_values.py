"""Reference values frozen into the test suite (mpmath, 50 digits)."""
from mpmath import mp, mpf, gamma, hyp2f1, hyp3f2, pi, sqrt, cbrt, log, exp, mpc, fabs, nsum, inf, cos
mp.dps = 50
mu = mpf(2)**(mpf(1)/3)*pi**2/(3*sqrt(3)*gamma(mpf(1)/6)**2*gamma(mpf(4)/3)**2)
print("gamma16", gamma(mpf(1)/6))
print("mu", mu)
def A(x):
    x = mpc(x)
    t = (x*hyp3f2(1,1,mpf(4)/3,2,mpf(5)/3,x) + x.conjugate()*hyp3f2(1,1,mpf(4)/3,2,mpf(5)/3,x.conjugate()))/4
    return (t - 6*mu*abs(x*(1-x))**(mpf(2)/3)*abs(hyp2f1(mpf(2)/3,1,mpf(4)/3,x))**2).real
print("2f1(0.5)", hyp2f1(mpf(2)/3,1,mpf(4)/3,0.5))
print("2f1(0.3+0.4i)", hyp2f1(mpf(2)/3,1,mpf(4)/3,mpc(0.3,0.4)))
print("3f2(-0.5)", hyp3f2(1,1,mpf(4)/3,2,mpf(5)/3,-0.5))
print("3f2(0.25)", hyp3f2(1,1,mpf(4)/3,2,mpf(5)/3,0.25))
print("3f2(0.3+0.4i)", hyp3f2(1,1,mpf(4)/3,2,mpf(5)/3,mpc(0.3,0.4)))
print("A(0.5)", A(0.5))
print("A(0.3+0.2i)", A(mpc(0.3,0.2)), A(1-mpc(0.3,0.2)))
print("A(0.6)", A(0.6), "A(1/0.6)-log", A(1/mpf(0.6)) - log(0.6))
print("A(e^ipi/3)", A(mp.expjpi(mpf(1)/3)))
print("A(2+1i)", A(mpc(2,1)))
# halfplane 2pt
D = lambda b: (1-cos(b))/10
z1=mpc(0,1); z2=mpc(1,1)
d1=D(pi); d2=D(pi); d12=D(2*pi)
s = abs(z1-z2)**2/abs(z1-z2.conjugate())**2
e = d1+d2-d12
v = abs(z1-z2)**(-2*e)*abs(z1-z2.conjugate())**(2*e)*abs(z1-z1.conjugate())**(-2*d1)*abs(z2-z2.conjugate())**(-2*d2)*exp(-e*(1-s)*hyp3f2(1,1,mpf(4)/3,2,mpf(5)/3,1-s))
print("hp2", v, "sigma", s)
# winding gaussian
dw = nsum(lambda m: (1-exp(-m**2/2))/m**2, [1,inf])/(2*pi**2)
print("dw gauss s=1 b=1", dw)
print("sinc check", mp.sin(pi)/pi)
print("beta(1/3,1/3)", mp.beta(mpf(1)/3, mpf(1)/3))
