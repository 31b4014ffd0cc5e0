"""Thomas-Fermi functional, semiclassical diagnostics and 1D1V Vlasov-Poisson kinetics."""
