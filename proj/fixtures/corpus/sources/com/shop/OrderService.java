package com.shop;

import java.util.ArrayList;
import java.util.List;
import java.util.Map;

public class OrderService {
    private final Inventory inventory;
    private final PriceBook prices;
    private final AuditLog audit;
    private double taxRate;

    public OrderService(Inventory inventory, PriceBook prices, AuditLog audit) {
        this.inventory = inventory;
        this.prices = prices;
        this.audit = audit;
    }

    public Invoice checkout(Cart cart, Customer customer) {
        if (cart.isEmpty()) {
            throw new IllegalArgumentException("empty cart");
        }
        audit.record("checkout", customer.id());
        // compute the subtotal of all lines
        double subtotal = 0;
        for (CartLine line : cart.lines()) {
            double unit = prices.priceOf(line.sku());
            subtotal += unit * line.quantity();
        }

        double discount = customer.isPremium() ? subtotal * 0.05 : 0;
        double taxed = (subtotal - discount) * (1 + taxRate);
        Invoice invoice = new Invoice(customer.id());
        invoice.setSubtotal(subtotal);
        invoice.setDiscount(discount);
        invoice.setTotal(taxed);
        for (CartLine line : cart.lines()) {
            inventory.reserve(line.sku(), line.quantity());
        }
        audit.record("invoice", invoice.number());
        return invoice;
    }

    public List<String> restockReport(Map<String, Integer> levels, int threshold) {
        List<String> report = new ArrayList<>();
        audit.record("restock", levels.size());
        String header = "Restock below " + threshold;
        report.add(header);
        int missing = 0;
        for (Map.Entry<String, Integer> e : levels.entrySet()) {
            if (e.getValue() < threshold) {
                missing++;
            }
        }
        report.add("missing: " + missing);

        for (Map.Entry<String, Integer> e : levels.entrySet()) {
            int level = e.getValue();
            if (level < threshold) {
                String row = e.getKey() + " -> " + (threshold - level);
                report.add(row);
            }
        }
        audit.record("restock-done", report.size());
        return report;
    }

    public void applyPromotion(Cart cart, Promotion promo) {
        audit.record("promo", promo.code());
        if (!promo.isActive()) {
            return;
        }
        int eligible = 0;
        for (CartLine line : cart.lines()) {
            if (promo.covers(line.sku())) {
                eligible += line.quantity();
            }
        }
        if (eligible >= promo.minimumQuantity()) {
            double credit = promo.creditPerItem() * eligible;
            cart.addCredit(credit);
            audit.record("promo-applied", credit);
        }
        cart.markPromotion(promo.code());
        audit.record("promo-done", eligible);
    }

    public Shipment ship(Invoice invoice, Address address) {
        Shipment shipment = new Shipment(invoice.number());
        shipment.setAddress(address);
        audit.record("ship", invoice.number());

        double weight = 0;
        int parcels = 0;
        for (InvoiceLine line : invoice.lines()) {
            weight += inventory.weightOf(line.sku()) * line.quantity();
            parcels++;
        }
        shipment.setWeight(weight);

        // choose the carrier by weight
        String carrier = "standard";
        if (weight > 30) {
            carrier = "freight";
        } else if (weight < 1) {
            carrier = "letter";
        }

        shipment.setCarrier(carrier);
        shipment.setParcels(parcels);
        audit.record("shipped", carrier);
        return shipment;
    }
}
