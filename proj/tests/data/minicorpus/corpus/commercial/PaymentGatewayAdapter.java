package com.example.billing;

import java.math.BigDecimal;

public class PaymentGatewayAdapter implements PaymentProcessor {
    private final LegacyGateway gateway;

    public PaymentGatewayAdapter(LegacyGateway gateway) {
        this.gateway = gateway;
    }

    @Override
    public PaymentResult charge(String account, BigDecimal amount) {
        long cents = toCents(amount);
        int code = gateway.submit(account, cents);
        return translate(code);
    }

    private long toCents(BigDecimal amount) {
        return amount.movePointRight(2).longValueExact();
    }

    private PaymentResult translate(int code) {
        if (code == 0) {
            return PaymentResult.approved();
        }
        return PaymentResult.declined(code);
    }
}
