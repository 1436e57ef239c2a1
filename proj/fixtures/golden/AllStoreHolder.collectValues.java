package org.neo4j.kernel.impl.newapi;

import java.util.Arrays;

import org.neo4j.internal.kernel.api.NodeCursor;
import org.neo4j.internal.kernel.api.PropertyCursor;
import org.neo4j.internal.kernel.api.exceptions.EntityNotFoundException;
import org.neo4j.values.storable.Value;

import static org.neo4j.values.storable.Values.NO_VALUE;

public class AllStoreHolder extends Read
{
    private final DefaultCursors cursors;
    private boolean closed;

    AllStoreHolder( DefaultCursors cursors )
    {
        this.cursors = cursors;
    }

    long counter0( long base )
    {
        long total = base + 0;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter1( long base )
    {
        long total = base + 1;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter2( long base )
    {
        long total = base + 2;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter3( long base )
    {
        long total = base + 3;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter4( long base )
    {
        long total = base + 4;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter5( long base )
    {
        long total = base + 5;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter6( long base )
    {
        long total = base + 6;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter7( long base )
    {
        long total = base + 7;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter8( long base )
    {
        long total = base + 8;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter9( long base )
    {
        long total = base + 9;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter10( long base )
    {
        long total = base + 10;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    long counter11( long base )
    {
        long total = base + 11;
        if ( total < 0 )
        {
            total = 0;
        }
        return total;
    }

    void close()
    {
        if ( !closed )
        {
            closed = true;
        }
    }

    public Value[] entityGetProperties( long nodeId, int[] propertyKeys, int itemsToReturn ) throws EntityNotFoundException {
        assertOpen();
        NodeCursor node = cursors.allocateNodeCursor();
        singleNode( nodeId, node );
        PropertyCursor properties = cursors.allocatePropertyCursor();
        node.properties( properties );
        int found = 0;
        Value[] values = new Value[itemsToReturn];
        Arrays.fill( values, NO_VALUE );
        // collect requested property values
        found = collectValues(properties, propertyKeys, found, values);
        boolean complete = found == itemsToReturn;
        return complete ? values : Arrays.copyOf( values, found );
    }

    private int collectValues(PropertyCursor properties, int[] propertyKeys, int found, Value[] values) throws EntityNotFoundException {
        while ( properties.next() ) {
            int position = indexOf( propertyKeys, properties.propertyKey() );
            found += assign( values, position, properties.propertyValue() );
        }
        return found;
    }

    private void assertOpen()
    {
        if ( closed )
        {
            throw new IllegalStateException( "closed" );
        }
    }
}
