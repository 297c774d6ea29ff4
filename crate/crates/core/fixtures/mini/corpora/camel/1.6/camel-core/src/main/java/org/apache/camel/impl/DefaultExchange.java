package org.apache.camel.impl;

import java.util.HashMap;
import java.util.Map;

import org.apache.camel.CamelContext;
import org.apache.camel.Exchange;
import org.apache.camel.Message;

/**
 * A default implementation of Exchange
 */
public class DefaultExchange implements Exchange {
    protected final CamelContext context;
    private Map<String, Object> properties;
    private Message in;
    private Message out;

    public DefaultExchange(CamelContext context) {
        this.context = context;
    }

    /**
     * Returns the inbound message, lazily created on first access.
     */
    public Message getIn() {
        if (in == null) {
            in = createInMessage();
        }
        return in;
    }

    public <T> T getIn(Class<T> type) {
        return type.cast(getIn());
    }

    public Exchange copy() {
        DefaultExchange exchange = new DefaultExchange(context);
        exchange.getProperties().putAll(getProperties());
        return exchange;
    }

    public Map<String, Object> getProperties() {
        if (properties == null) {
            properties = new HashMap<String, Object>();
        }
        return properties;
    }

    protected Message createInMessage() {
        return null;
    }
}
